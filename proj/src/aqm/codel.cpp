#include "rpm/aqm/codel.hpp"

#include <cmath>

#include "rpm/core/errors.hpp"

namespace rpm::aqm {

CodelState make_codel(SimTime target, SimTime interval) {
  if (target <= SimTime{} || interval <= SimTime{}) throw ConfigError("codel target and interval must be positive");
  CodelState s;
  s.target = target;
  s.interval = interval;
  return s;
}

SimTime control_law(SimTime drop_next, std::uint32_t count, SimTime interval) {
  if (count == 0) throw ContractViolation("codel control_law with count == 0");
  const double step = static_cast<double>(interval.ns()) / std::sqrt(static_cast<double>(count));
  return drop_next + SimTime::from_ns(static_cast<std::int64_t>(std::floor(step + 0.5)));
}

namespace {

// True once the sojourn time has stayed at or above target for a full interval.
bool ok_to_signal(CodelState& s, SimTime sojourn, SimTime now) {
  if (sojourn < s.target) {
    s.first_above_time.reset();
    return false;
  }
  if (!s.first_above_time) {
    s.first_above_time = now + s.interval;
    return false;
  }
  return now >= *s.first_above_time;
}

}  // namespace

CodelDecision codel_evaluate(CodelState& s, SimTime sojourn, SimTime now) {
  const bool ok = ok_to_signal(s, sojourn, now);

  if (s.in_dropping) {
    if (!ok) {
      s.in_dropping = false;
      return CodelDecision::Forward;
    }
    if (now >= s.drop_next) {
      ++s.count;
      s.drop_next = control_law(s.drop_next, s.count, s.interval);
      ++s.signals;
      return CodelDecision::Signal;
    }
    return CodelDecision::Forward;
  }

  if (!ok) return CodelDecision::Forward;

  s.in_dropping = true;
  // Re-entering shortly after leaving the dropping state resumes near the old rate.
  const std::uint32_t delta = s.count - s.last_count;
  s.count = 1;
  if (delta > 1 && now - s.drop_next < s.interval * 16) s.count = delta;
  s.drop_next = control_law(now, s.count, s.interval);
  s.last_count = s.count;
  ++s.signals;
  return CodelDecision::Signal;
}

}  // namespace rpm::aqm
