#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

// Domain types for a two-pair cognitive shared channel: a high-priority
// source powered by stochastic energy harvesting and a low-priority source
// on mains power, sharing one slotted channel with multipacket reception.

namespace cogshare {

class InvalidParameter : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class PreconditionViolated : public std::domain_error {
  using std::domain_error::domain_error;
};

class OutOfRegion : public std::domain_error {
  using std::domain_error::domain_error;
};

class DegenerateChannel : public std::domain_error {
  using std::domain_error::domain_error;
};

class InvalidConfig : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// |eta| <= kEtaTol is classified as the eta <= 0 branch.
inline constexpr double kEtaTol = 1e-12;

// Reception success probabilities q_{i/I}: probability that a transmission
// by source i is decoded given the set I of simultaneous transmitters.
//
//   q11  = q_{1/1}    primary alone
//   q22  = q_{2/2}    secondary alone
//   q112 = q_{1/1,2}  primary under simultaneous transmission
//   q212 = q_{2/1,2}  secondary under simultaneous transmission
//
// Requires q11 >= q112 and q22 >= q212 (interference never helps).
struct ChannelModel {
  double q11;
  double q22;
  double q112;
  double q212;

  ChannelModel(double q11, double q22, double q112, double q212);

  // Success-probability loss caused by simultaneous transmission.
  double delta1() const { return q11 - q112; }
  double delta2() const { return q22 - q212; }

  // Multipacket-reception capability index. Positive means simultaneous
  // transmissions can enlarge the stable rate region; -1 for the pure
  // collision channel (1,1,0,0).
  double eta() const { return q11 * q212 + q22 * q112 - q22 * q11; }

  bool eta_positive() const { return eta() > kEtaTol; }

  // Simultaneous transmissions always fail (collision channel with
  // probabilistic erasures 1-q11, 1-q22).
  bool collision_structured() const { return q112 == 0.0 && q212 == 0.0; }
};

// Energy harvesting at the primary node: one unit per slot with probability
// delta, stored in a battery of the given capacity (nullopt = unbounded).
struct EnergyModel {
  double delta;
  std::optional<int64_t> capacity;

  explicit EnergyModel(double delta,
                       std::optional<int64_t> capacity = std::nullopt);

  bool unbounded() const { return !capacity.has_value(); }

  // Stationary probability that the battery of a saturated transmitter
  // (one consumption attempt per slot) is nonempty:
  //
  //   unbounded capacity:  delta
  //   capacity c:          delta (1 - delta^c) / (1 - delta^{c+1})
  //
  // and 1 when delta = 1 regardless of capacity.
  double battery_nonempty_prob() const;
};

// Bernoulli packet arrival rates, packets per slot.
struct ArrivalRates {
  double lambda1;
  double lambda2;

  ArrivalRates(double lambda1, double lambda2);
};

// Random-access policy of the secondary: transmit with probability p when
// the primary is active (and with probability 1 when it is idle).
struct AccessPolicy {
  double p;

  explicit AccessPolicy(double p);
};

// Full parameterization of one system instance.
struct Scenario {
  ChannelModel channel;
  EnergyModel energy;
  ArrivalRates arrivals;
  AccessPolicy policy;
};

}  // namespace cogshare
