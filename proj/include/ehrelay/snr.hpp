#pragma once

// Per-realization quantities: harvested energy, relay power, end-to-end SNR.

#include <cmath>

#include "ehrelay/model.hpp"

namespace ehrelay {

/// Total noise variances seen by the relay information receiver and by the
/// destination.
struct NoiseDecomposition {
  double relay_total_var = 0.0;
  double dest_total_var = 0.0;
};

/// PSR attenuates the antenna noise by the information share (1 - rho) before
/// conversion noise is added; TSR and the ideal receiver see the plain sum.
inline NoiseDecomposition noise_decomposition(const SystemParams& params, const Protocol& protocol) {
  const double sum = params.antenna_noise_var + params.conversion_noise_var;
  NoiseDecomposition out{sum, sum};
  if (protocol.kind() == ProtocolKind::PSR) {
    out.relay_total_var =
        (1.0 - protocol.fraction_or_zero()) * params.antenna_noise_var + params.conversion_noise_var;
  }
  return out;
}

/// Energy collected by the relay during one block of length `block_time`.
inline double harvested_energy(const SystemParams& params, const Protocol& protocol,
                               const ChannelRealization& ch) {
  const double received = params.harvesting_efficiency * params.source_power * ch.gain_sr_sq /
                          params.path_loss_sr();
  const double t = params.block_time;
  switch (protocol.kind()) {
    case ProtocolKind::TSR: return received * protocol.fraction_or_zero() * t;
    case ProtocolKind::PSR: return received * protocol.fraction_or_zero() * t / 2.0;
    case ProtocolKind::Ideal: return received * t / 2.0;
  }
  return 0.0;
}

/// Relay transmit power. TSR spends the harvested energy over (1 - alpha) T / 2,
/// so alpha = 1 has no forwarding interval and is rejected.
inline double relay_power(const SystemParams& params, const Protocol& protocol,
                          const ChannelRealization& ch) {
  const double received = params.harvesting_efficiency * params.source_power * ch.gain_sr_sq /
                          params.path_loss_sr();
  switch (protocol.kind()) {
    case ProtocolKind::TSR: {
      const double alpha = protocol.fraction_or_zero();
      if (alpha >= 1.0) {
        throw ParameterError("relay_power: TSR with alpha = 1 leaves no forwarding interval");
      }
      return 2.0 * received * alpha / (1.0 - alpha);
    }
    case ProtocolKind::PSR: return received * protocol.fraction_or_zero();
    case ProtocolKind::Ideal: return received;
  }
  return 0.0;
}

/// End-to-end SNR at the destination in its reduced closed form.
///
/// TSR at alpha = 1 is evaluated by continuity (the (1 - alpha) terms vanish).
/// A zero numerator returns 0 even where the denominator also vanishes.
inline double instantaneous_snr(const SystemParams& params, const Protocol& protocol,
                                const ChannelRealization& ch) {
  const NoiseDecomposition noise = noise_decomposition(params, protocol);
  const double sr = noise.relay_total_var;
  const double sd = noise.dest_total_var;
  const double eta = params.harvesting_efficiency;
  const double ps = params.source_power;
  const double l1 = params.path_loss_sr();
  const double l2 = params.path_loss_rd();
  const double h = ch.gain_sr_sq;
  const double g = ch.gain_rd_sq;

  // Shared shape: num * share / (eh * share_eh + sh * share_sh + rd * share_rd)
  const double num = eta * ps * ps * h * h * g;
  const double eh_term = eta * ps * h * g * l1 * sr;
  const double sh_term = ps * h * l1 * l2 * sd;
  const double rd_term = l1 * l1 * l2 * sr * sd;

  double numerator = 0.0;
  double denominator = 0.0;
  switch (protocol.kind()) {
    case ProtocolKind::TSR: {
      const double alpha = protocol.fraction_or_zero();
      numerator = 2.0 * num * alpha;
      denominator = 2.0 * eh_term * alpha + sh_term * (1.0 - alpha) + rd_term * (1.0 - alpha);
      break;
    }
    case ProtocolKind::PSR: {
      const double rho = protocol.fraction_or_zero();
      numerator = num * rho * (1.0 - rho);
      denominator = eh_term * rho + sh_term * (1.0 - rho) + rd_term;
      break;
    }
    case ProtocolKind::Ideal:
      numerator = num;
      denominator = eh_term + sh_term + rd_term;
      break;
  }
  if (numerator == 0.0) {
    return 0.0;
  }
  return numerator / denominator;
}

}  // namespace ehrelay
