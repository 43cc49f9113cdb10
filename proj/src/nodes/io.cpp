#include "selfheal/nodes/io.hpp"

#include "selfheal/nodes/common.hpp"

namespace selfheal::nodes {

void MqttInNode::on_input(NodeContext& ctx, int, const Envelope& e) { ctx.emit(0, e.message()); }

void MqttOutNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  Message m = e.message();
  if (topic_) {
    m.topic = *topic_;
  }
  ctx.publish(m);
}

void HttpOutNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  Message m = e.message();
  if (topic_) {
    m.topic = *topic_;
  }
  int status = 200;
  switch (ctx.request_service(service_, m)) {
    case RequestStatus::Delivered:
      break;
    case RequestStatus::ServiceDown:
      status = 503;
      break;
    case RequestStatus::UnknownService:
      status = 404;
      break;
  }
  forward(ctx, 0, e, Payload{{"service", service_}, {"status", status}});
}

void InjectNode::start(NodeContext& ctx) { ctx.start_timer(period_); }

void InjectNode::on_input(NodeContext& ctx, int, const Envelope& e) { ctx.emit(0, e.message()); }

void InjectNode::on_timer(NodeContext& ctx, TimerId, int) {
  ctx.start_timer(period_);
  ctx.emit(0, Message{topic_, payload_, std::nullopt});
}

void ExtractNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  if (e.payload.is_object()) {
    if (auto it = e.payload.find(field_); it != e.payload.end()) {
      forward(ctx, 0, e, *it);
      return;
    }
  }
  forward(ctx, 1, e, error_payload("missing-field", field_));
}

void SwitchNode::on_input(NodeContext& ctx, int, const Envelope& e) {
  const Payload* subject = &e.payload;
  if (!property_.empty()) {
    subject = nullptr;
    if (e.payload.is_object()) {
      if (auto it = e.payload.find(property_); it != e.payload.end()) {
        subject = &*it;
      }
    }
  }
  ctx.emit(subject && *subject == equals_ ? 0 : 1, e.message());
}

}  // namespace selfheal::nodes
