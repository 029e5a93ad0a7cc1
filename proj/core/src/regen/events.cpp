#include "regenlab/regen/events.hpp"

#include <memory>

#include "regenlab/errors.hpp"

namespace regenlab::regen {

std::string to_string(const FutureVerdict& v) {
  switch (v.kind) {
    case Verdict::kOccurs:
      return "Occurs(" + std::to_string(v.horizon_used) + ")";
    case Verdict::kFails:
      return "Fails(" + std::to_string(v.horizon_used) + ")";
    case Verdict::kUndecided:
      break;
  }
  return "Undecided(" + std::to_string(v.horizon_used) + ")";
}

FutureEventSpec::FutureEventSpec(std::string name, StepperFactory factory, std::int64_t lookahead)
    : name_(std::move(name)), factory_(std::move(factory)), lookahead_(lookahead) {
  if (!factory_) throw ConfigError("future event '" + name_ + "': missing evaluator");
  if (lookahead_ < 0) throw ConfigError("future event '" + name_ + "': negative lookahead");
}

FutureEventSpec FutureEventSpec::with_direct(DirectEvaluator direct) const {
  FutureEventSpec copy = *this;
  copy.direct_ = std::move(direct);
  return copy;
}

FutureEventSpec FutureEventSpec::always() {
  return FutureEventSpec(
      "always", [](const core::DrivingStream&, std::int64_t) { return [](std::int64_t) { return Progress::kOccurs; }; },
      0);
}

FutureEventSpec FutureEventSpec::next_symbol(std::string name, std::function<bool(core::Symbol)> pred) {
  return FutureEventSpec(
      std::move(name),
      [pred = std::move(pred)](const core::DrivingStream& s, std::int64_t n) {
        return [&s, n, pred](std::int64_t) { return pred(s.sample_at(n + 1)) ? Progress::kOccurs : Progress::kFails; };
      },
      1);
}

FutureEventSpec FutureEventSpec::intersect(const FutureEventSpec& a, const FutureEventSpec& b) {
  const std::int64_t la = a.lookahead();
  const std::int64_t lb = b.lookahead();
  auto factory = [a, b, la, lb](const core::DrivingStream& s, std::int64_t n) {
    struct State {
      FutureStepper sa, sb;
      bool done_a = false, done_b = false;
    };
    auto st = std::make_shared<State>(State{a.stepper(s, n), b.stepper(s, n)});
    return [st, la, lb](std::int64_t lag) {
      auto run = [lag](FutureStepper& step, bool& done, std::int64_t lookahead) {
        if (done) return Progress::kOccurs;
        Progress p = lag > lookahead ? Progress::kOccurs : step(lag);
        if (p == Progress::kContinue && lag == lookahead) p = Progress::kOccurs;
        if (p == Progress::kOccurs) done = true;
        return p;
      };
      const Progress pa = run(st->sa, st->done_a, la);
      if (pa == Progress::kFails) return Progress::kFails;
      const Progress pb = run(st->sb, st->done_b, lb);
      if (pb == Progress::kFails) return Progress::kFails;
      return (st->done_a && st->done_b) ? Progress::kOccurs : Progress::kContinue;
    };
  };
  return FutureEventSpec(a.name() + "&" + b.name(), factory, std::max(la, lb));
}

FutureVerdict evaluate_future(const FutureEventSpec& spec, const core::DrivingStream& stream, std::int64_t n,
                              std::int64_t horizon, bool incremental_only) {
  if (horizon < 1) throw ConfigError("evaluate_future: horizon must be >= 1");
  if (!incremental_only && spec.has_direct()) return spec.direct()(stream, n, horizon);
  if (spec.lookahead() == 0) return FutureVerdict::occurs(0);
  auto step = spec.stepper(stream, n);
  const std::int64_t last = std::min(horizon, spec.lookahead());
  for (std::int64_t lag = 1; lag <= last; ++lag) {
    switch (step(lag)) {
      case Progress::kOccurs:
        return FutureVerdict::occurs(lag);
      case Progress::kFails:
        return FutureVerdict::fails(lag);
      case Progress::kContinue:
        break;
    }
  }
  if (last == spec.lookahead()) return FutureVerdict::occurs(last);
  return FutureVerdict::undecided(horizon);
}

core::Symbol History::xi(std::int64_t i) const {
  if (i > n_)
    throw MeasurabilityError("past event read xi_" + std::to_string(i) + " at base time " + std::to_string(n_));
  return stream_->sample_at(i);
}

PastEventSpec PastEventSpec::always() {
  return {"always", [](const History&) { return true; }};
}

void PartialSumAdapter::reset(const core::DrivingStream& stream) {
  stream_ = &stream;
  n_ = 0;
  sum_ = 0.0;
}

void PartialSumAdapter::advance() {
  ++n_;
  sum_ += stream_->sample_at(n_);
}

}  // namespace regenlab::regen
