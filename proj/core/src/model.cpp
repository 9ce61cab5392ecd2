#include "cogshare/model.hpp"

#include <cmath>
#include <string>

namespace cogshare {

namespace {

void check_probability(double value, const char* name) {
  // The negated form also rejects NaN.
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidParameter(std::string(name) + " must lie in [0, 1], got " +
                           std::to_string(value));
  }
}

}  // namespace

ChannelModel::ChannelModel(double q11, double q22, double q112, double q212)
    : q11(q11), q22(q22), q112(q112), q212(q212) {
  check_probability(q11, "q11");
  check_probability(q22, "q22");
  check_probability(q112, "q112");
  check_probability(q212, "q212");
  if (q112 > q11) {
    throw InvalidParameter("q112 must not exceed q11 (" +
                           std::to_string(q112) + " > " + std::to_string(q11) +
                           ")");
  }
  if (q212 > q22) {
    throw InvalidParameter("q212 must not exceed q22 (" +
                           std::to_string(q212) + " > " + std::to_string(q22) +
                           ")");
  }
}

EnergyModel::EnergyModel(double delta, std::optional<int64_t> capacity)
    : delta(delta), capacity(capacity) {
  check_probability(delta, "delta");
  if (capacity.has_value() && *capacity < 1) {
    throw InvalidParameter("battery capacity must be >= 1, got " +
                           std::to_string(*capacity));
  }
}

double EnergyModel::battery_nonempty_prob() const {
  if (delta >= 1.0) {
    return 1.0;  // battery refills every slot, never observed empty
  }
  if (!capacity.has_value()) {
    return delta;
  }
  const double dc = std::pow(delta, static_cast<double>(*capacity));
  return delta * (1.0 - dc) / (1.0 - delta * dc);
}

ArrivalRates::ArrivalRates(double lambda1, double lambda2)
    : lambda1(lambda1), lambda2(lambda2) {
  // Bernoulli per-slot arrivals admit at most one packet per slot.
  check_probability(lambda1, "lambda1");
  check_probability(lambda2, "lambda2");
}

AccessPolicy::AccessPolicy(double p) : p(p) { check_probability(p, "p"); }

}  // namespace cogshare
