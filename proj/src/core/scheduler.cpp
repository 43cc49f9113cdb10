#include "selfheal/core/scheduler.hpp"

#include <stdexcept>
#include <string>

namespace selfheal {

EventId Scheduler::schedule_at(TimeMs at, Callback cb) {
  if (at < now_) {
    throw std::invalid_argument("Scheduler: cannot schedule at " + std::to_string(at) +
                                " before now=" + std::to_string(now_));
  }
  const EventId id = next_id_++;
  queue_.emplace(Key{at, id}, std::move(cb));
  index_.emplace(id, at);
  return id;
}

bool Scheduler::cancel(EventId id) {
  auto it = index_.find(id);
  if (it == index_.end()) {
    return false;
  }
  queue_.erase(Key{it->second, id});
  index_.erase(it);
  return true;
}

std::optional<TimeMs> Scheduler::next_time() const {
  if (queue_.empty()) {
    return std::nullopt;
  }
  return queue_.begin()->first.first;
}

bool Scheduler::step(TimeMs limit) {
  if (queue_.empty()) {
    return false;
  }
  auto it = queue_.begin();
  if (it->first.first > limit) {
    return false;
  }
  now_ = it->first.first;
  Callback cb = std::move(it->second);
  index_.erase(it->first.second);
  queue_.erase(it);
  cb();
  return true;
}

void Scheduler::run_until(TimeMs t_end) {
  if (t_end < now_) {
    throw std::invalid_argument("Scheduler: run_until target lies in the past");
  }
  while (step(t_end)) {
  }
  now_ = t_end;
}

}  // namespace selfheal
