#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "regenlab/core/driving_stream.hpp"

namespace regenlab::regen {

enum class Verdict : std::uint8_t { kOccurs, kFails, kUndecided };

struct FutureVerdict {
  Verdict kind = Verdict::kUndecided;
  // Lag at which the verdict was reached, or the horizon for Undecided.
  std::int64_t horizon_used = 0;

  static FutureVerdict occurs(std::int64_t lag) { return {Verdict::kOccurs, lag}; }
  static FutureVerdict fails(std::int64_t lag) { return {Verdict::kFails, lag}; }
  static FutureVerdict undecided(std::int64_t horizon) { return {Verdict::kUndecided, horizon}; }

  bool is_occurs() const noexcept { return kind == Verdict::kOccurs; }
  bool is_fails() const noexcept { return kind == Verdict::kFails; }
  bool is_undecided() const noexcept { return kind == Verdict::kUndecided; }
  friend bool operator==(const FutureVerdict&, const FutureVerdict&) = default;
};

std::string to_string(const FutureVerdict& v);

enum class Progress : std::uint8_t { kOccurs, kFails, kContinue };

// Consumes lags 1, 2, ... of the future after a fixed base index.
using FutureStepper = std::function<Progress(std::int64_t lag)>;

inline constexpr std::int64_t kUnboundedLookahead = std::numeric_limits<std::int64_t>::max();

// A future event F_n. The same evaluator is applied at every base index, so
// stationarity holds by construction. Two forms are supported: an incremental
// stepper (the reference semantics) and an optional direct evaluator that a
// process module may install when it can answer many base indices faster.
class FutureEventSpec {
 public:
  using StepperFactory = std::function<FutureStepper(const core::DrivingStream&, std::int64_t n)>;
  using DirectEvaluator = std::function<FutureVerdict(const core::DrivingStream&, std::int64_t n, std::int64_t horizon)>;

  FutureEventSpec(std::string name, StepperFactory factory, std::int64_t lookahead = kUnboundedLookahead);

  // A stepper still undecided at lag `lookahead` counts as Occurs: the event
  // is then an event of xi_{n+1..n+lookahead}.
  std::int64_t lookahead() const noexcept { return lookahead_; }
  const std::string& name() const noexcept { return name_; }

  FutureStepper stepper(const core::DrivingStream& s, std::int64_t n) const { return factory_(s, n); }
  FutureEventSpec with_direct(DirectEvaluator direct) const;
  bool has_direct() const noexcept { return static_cast<bool>(direct_); }
  const DirectEvaluator& direct() const noexcept { return direct_; }

  static FutureEventSpec always();
  // F_n holds iff the symbol predicate holds at lag 1.
  static FutureEventSpec next_symbol(std::string name, std::function<bool(core::Symbol)> pred);
  // Both events occur. Lookahead is the larger of the two.
  static FutureEventSpec intersect(const FutureEventSpec& a, const FutureEventSpec& b);

 private:
  std::string name_;
  StepperFactory factory_;
  DirectEvaluator direct_;
  std::int64_t lookahead_;
};

// Verdict from xi_{n+1}..xi_{n+horizon} only. Uses the direct evaluator when
// present; `incremental_only` forces the stepper.
FutureVerdict evaluate_future(const FutureEventSpec& spec, const core::DrivingStream& stream, std::int64_t n,
                              std::int64_t horizon, bool incremental_only = false);

class ProcessAdapter;

// Read access to the history at base time n. Reading an index beyond n is a
// measurability violation.
class History {
 public:
  History(std::int64_t n, const core::DrivingStream& stream, const ProcessAdapter* process)
      : n_(n), stream_(&stream), process_(process) {}

  std::int64_t n() const noexcept { return n_; }
  core::Symbol xi(std::int64_t i) const;
  const ProcessAdapter* process() const noexcept { return process_; }
  const core::DrivingStream& stream() const noexcept { return *stream_; }

 private:
  std::int64_t n_;
  const core::DrivingStream* stream_;
  const ProcessAdapter* process_;
};

struct PastEventSpec {
  std::string name;
  std::function<bool(const History&)> predicate;

  bool operator()(const History& h) const { return predicate(h); }
  static PastEventSpec always();
};

// Process {X_n} driven by the stream: reset() puts it at time 0, advance()
// moves it from n to n+1 consuming xi_{n+1}. observable() is the scalar state
// summary that relative functionals and past events read.
class ProcessAdapter {
 public:
  virtual ~ProcessAdapter() = default;
  virtual void reset(const core::DrivingStream& stream) = 0;
  virtual void advance() = 0;
  virtual std::int64_t time() const = 0;
  virtual double observable() const = 0;
};

// S_n = xi_1 + ... + xi_n.
class PartialSumAdapter final : public ProcessAdapter {
 public:
  void reset(const core::DrivingStream& stream) override;
  void advance() override;
  std::int64_t time() const override { return n_; }
  double observable() const override { return sum_; }

 private:
  const core::DrivingStream* stream_ = nullptr;
  std::int64_t n_ = 0;
  double sum_ = 0.0;
};

}  // namespace regenlab::regen
