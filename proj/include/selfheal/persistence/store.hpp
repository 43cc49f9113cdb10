#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfheal/core/envelope.hpp"

namespace selfheal::persistence {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckpointRecord {
  TimeMs timestamp = 0;
  Message last_message;
};

enum class DeviceStatus { Online, Lost };

std::string_view to_string(DeviceStatus status);

struct RegistryEntry {
  std::string device_id;
  std::string kind;
  std::string endpoint;
  TimeMs last_seen = 0;
  DeviceStatus status = DeviceStatus::Online;

  bool operator==(const RegistryEntry&) const = default;
};

/// Durable per-instance state: one checkpoint slot per node plus the device
/// registry.
///
/// Every mutation appends one human-readable line to the backing record:
///
///   CKPT <nodeId> <timestamp> <compact-JSON>     ({"topic":..,"payload":..} or null once cleared)
///   REG <deviceId> <kind> <endpoint> <lastSeen> <online|lost>
///
/// Later lines supersede earlier ones for the same key. The record is
/// compacted (rewritten with only live lines) once it grows past twice the
/// live size. A store opened on a file replays that file, so it survives
/// process restarts as well as simulated instance restarts.
class Store {
 public:
  Store() = default;

  /// Opens (or creates) a file-backed store.
  static Store open(const std::filesystem::path& path);

  /// Rebuilds a memory-only store from backing text. Corrupt lines are skipped
  /// and reported through diagnostics().
  static Store from_text(std::string_view text);

  void store_checkpoint(const std::string& node_id, const Message& message, TimeMs timestamp);
  std::optional<CheckpointRecord> load_checkpoint(const std::string& node_id) const;
  void clear_checkpoint(const std::string& node_id);

  /// Inserts or refreshes; lastSeen never moves backwards. Returns the stored entry.
  RegistryEntry registry_upsert(RegistryEntry entry);
  /// Throws StoreError for unknown ids.
  RegistryEntry registry_mark_lost(const std::string& device_id, TimeMs now);
  std::optional<RegistryEntry> registry_find(const std::string& device_id) const;
  /// Sorted by deviceId.
  std::vector<RegistryEntry> registry_list() const;

  /// Current backing record, one entry per line.
  const std::vector<std::string>& lines() const { return lines_; }
  std::string text() const;
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  /// Makes every subsequent write throw StoreError (failure injection).
  void fail_writes(bool fail) { fail_writes_ = fail; }

 private:
  void apply_line(const std::string& line);
  void write_line(std::string line);
  void compact_if_needed();
  std::size_t live_count() const;

  std::map<std::string, std::optional<CheckpointRecord>> checkpoints_;
  std::map<std::string, RegistryEntry> registry_;
  std::vector<std::string> lines_;
  std::vector<std::string> diagnostics_;
  std::optional<std::filesystem::path> path_;
  bool fail_writes_ = false;
};

}  // namespace selfheal::persistence
