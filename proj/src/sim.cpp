#include "anchor/sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "anchor/rng.hpp"

namespace anchor {

void ShotResult::merge(const ShotResult& other) {
  for (const auto& [key, n] : other.counts) counts[key] += n;
  total += other.total;
}

Distribution ShotResult::to_distribution() const {
  if (total <= 0) throw std::invalid_argument("empty shot result");
  Distribution d;
  for (const auto& [key, n] : counts)
    d[key] = static_cast<double>(n) / static_cast<double>(total);
  return d;
}

double tvd(const Distribution& p, const Distribution& q) {
  double sum = 0;
  auto ip = p.begin();
  auto iq = q.begin();
  while (ip != p.end() || iq != q.end()) {
    if (iq == q.end() || (ip != p.end() && ip->first < iq->first)) {
      sum += std::abs(ip->second);
      ++ip;
    } else if (ip == p.end() || iq->first < ip->first) {
      sum += std::abs(iq->second);
      ++iq;
    } else {
      sum += std::abs(ip->second - iq->second);
      ++ip;
      ++iq;
    }
  }
  return 50.0 * sum;  // 0.5 * sum * 100%
}

namespace {

using cplx = std::complex<double>;

constexpr int kMaxSimQubits = 14;

struct StateVector {
  int n = 0;
  std::vector<cplx> amp;

  explicit StateVector(int qubits) : n(qubits), amp(size_t(1) << qubits, cplx(0, 0)) {
    amp[0] = cplx(1, 0);
  }

  void apply_1q(int q, cplx a, cplx b, cplx c, cplx d) {
    size_t mask = size_t(1) << q;
    for (size_t i = 0; i < amp.size(); ++i) {
      if (i & mask) continue;
      cplx x = amp[i], y = amp[i | mask];
      amp[i] = a * x + b * y;
      amp[i | mask] = c * x + d * y;
    }
  }

  void apply_x(int q) {
    size_t mask = size_t(1) << q;
    for (size_t i = 0; i < amp.size(); ++i)
      if (!(i & mask)) std::swap(amp[i], amp[i | mask]);
  }

  void apply_y(int q) {
    size_t mask = size_t(1) << q;
    for (size_t i = 0; i < amp.size(); ++i) {
      if (i & mask) continue;
      cplx x = amp[i], y = amp[i | mask];
      amp[i] = cplx(0, -1) * y;
      amp[i | mask] = cplx(0, 1) * x;
    }
  }

  void apply_z(int q) {
    size_t mask = size_t(1) << q;
    for (size_t i = 0; i < amp.size(); ++i)
      if (i & mask) amp[i] = -amp[i];
  }

  void apply_sx(int q) {
    apply_1q(q, cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5));
  }

  void apply_rz(int q, double angle) {
    cplx lo = std::polar(1.0, -angle / 2), hi = std::polar(1.0, angle / 2);
    size_t mask = size_t(1) << q;
    for (size_t i = 0; i < amp.size(); ++i) amp[i] *= (i & mask) ? hi : lo;
  }

  void apply_u3(int q, double theta, double phi, double lambda) {
    double ct = std::cos(theta / 2), st = std::sin(theta / 2);
    apply_1q(q, cplx(ct, 0), -std::polar(st, lambda), std::polar(st, phi),
             std::polar(ct, phi + lambda));
  }

  void apply_cx(int ctl, int tgt) {
    size_t cmask = size_t(1) << ctl, tmask = size_t(1) << tgt;
    for (size_t i = 0; i < amp.size(); ++i)
      if ((i & cmask) && !(i & tmask)) std::swap(amp[i], amp[i | tmask]);
  }

  void apply_pauli(int p, int q) {  // 0 = I, 1 = X, 2 = Y, 3 = Z
    switch (p) {
      case 1: apply_x(q); break;
      case 2: apply_y(q); break;
      case 3: apply_z(q); break;
      default: break;
    }
  }

  // Probability that qubit q reads 1.
  double prob_one(int q) const {
    size_t mask = size_t(1) << q;
    double p = 0;
    for (size_t i = 0; i < amp.size(); ++i)
      if (i & mask) p += std::norm(amp[i]);
    return p;
  }

  // Projective collapse of qubit q to `bit`, renormalized.
  void collapse(int q, int bit, double prob) {
    size_t mask = size_t(1) << q;
    double scale = prob > 0 ? 1.0 / std::sqrt(prob) : 0.0;
    for (size_t i = 0; i < amp.size(); ++i) {
      bool one = (i & mask) != 0;
      if (one == (bit != 0))
        amp[i] *= scale;
      else
        amp[i] = cplx(0, 0);
    }
  }
};

// A routed (or logical) circuit compiled onto a compact local qubit index
// space, with the bookkeeping the trajectory sampler needs.
struct CompiledCircuit {
  int n_local = 0;
  std::vector<int> local_of_phys;  // physical -> local, -1 if untouched
  struct Op {
    GateKind kind;
    int q0 = -1, q1 = -1;       // local indices
    int phys0 = -1, phys1 = -1; // original indices, for rate lookup
    double p0 = 0, p1 = 0, p2 = 0;
  };
  std::vector<Op> ops;                         // non-measure gates, in order
  std::vector<std::pair<int, int>> readout;    // (local qubit, cbit), routed order
  int n_cbits = 0;

  void apply_op(StateVector& sv, const Op& op) const {
    switch (op.kind) {
      case GateKind::X: sv.apply_x(op.q0); break;
      case GateKind::SX: sv.apply_sx(op.q0); break;
      case GateKind::RZ: sv.apply_rz(op.q0, op.p0); break;
      case GateKind::U3: sv.apply_u3(op.q0, op.p0, op.p1, op.p2); break;
      case GateKind::CX: sv.apply_cx(op.q0, op.q1); break;
      case GateKind::Measure: break;
    }
  }
};

CompiledCircuit compile_circuit(const Circuit& c, const std::vector<int>& active) {
  CompiledCircuit cc;
  cc.local_of_phys.assign(c.num_qubits, -1);
  std::vector<int> sorted_active = active;
  std::sort(sorted_active.begin(), sorted_active.end());
  for (int p : sorted_active) {
    if (p < 0 || p >= c.num_qubits)
      throw std::invalid_argument("simulator: active qubit out of range");
    if (cc.local_of_phys[p] >= 0)
      throw std::invalid_argument("simulator: duplicate active qubit");
    cc.local_of_phys[p] = cc.n_local++;
  }
  if (cc.n_local > kMaxSimQubits)
    throw std::invalid_argument("simulator: exact statevector bound is 14 qubits");

  auto local = [&cc](int p) {
    int l = cc.local_of_phys[p];
    if (l < 0)
      throw std::invalid_argument("simulator: gate touches a qubit outside the map");
    return l;
  };

  std::vector<bool> cbit_seen;
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Measure) {
      int cbit = g.cbit;
      if (cbit < 0) throw std::invalid_argument("simulator: measure without classical bit");
      if (cbit >= static_cast<int>(cbit_seen.size())) cbit_seen.resize(cbit + 1, false);
      if (cbit_seen[cbit]) throw std::invalid_argument("simulator: duplicate classical bit");
      cbit_seen[cbit] = true;
      cc.readout.emplace_back(local(g.qubits[0]), cbit);
      continue;
    }
    CompiledCircuit::Op op;
    op.kind = g.kind;
    op.phys0 = g.qubits[0];
    op.q0 = local(op.phys0);
    if (g.kind == GateKind::CX) {
      op.phys1 = g.qubits[1];
      op.q1 = local(op.phys1);
    }
    op.p0 = g.params[0];
    op.p1 = g.params[1];
    op.p2 = g.params[2];
    cc.ops.push_back(op);
  }
  cc.n_cbits = static_cast<int>(cbit_seen.size());
  for (bool seen : cbit_seen)
    if (!seen) throw std::invalid_argument("simulator: classical bits must be contiguous");
  if (cc.n_cbits == 0) throw std::invalid_argument("simulator: circuit measures nothing");
  return cc;
}

std::string outcome_key(const CompiledCircuit& cc, size_t basis, uint64_t flip_mask) {
  std::string key(cc.n_cbits, '0');
  for (const auto& [lq, cbit] : cc.readout) {
    int bit = (basis >> lq) & 1;
    if ((flip_mask >> cbit) & 1) bit ^= 1;
    key[cbit] = static_cast<char>('0' + bit);
  }
  return key;
}

Distribution distribution_of(const CompiledCircuit& cc) {
  StateVector sv(cc.n_local);
  for (const auto& op : cc.ops) cc.apply_op(sv, op);
  Distribution d;
  for (size_t b = 0; b < sv.amp.size(); ++b) {
    double p = std::norm(sv.amp[b]);
    if (p > 1e-14) d[outcome_key(cc, b, 0)] += p;
  }
  return d;
}

std::vector<int> identity_active(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

Distribution ideal_distribution(const Circuit& c) {
  c.validate();
  if (c.num_qubits > kMaxSimQubits)
    throw std::invalid_argument("ideal_distribution: exact statevector bound is 14 qubits");
  int measures = 0;
  for (const Gate& g : c.gates)
    if (g.kind == GateKind::Measure) ++measures;
  if (measures != c.num_qubits)
    throw std::invalid_argument("ideal_distribution: every qubit must be measured");
  return distribution_of(compile_circuit(c, identity_active(c.num_qubits)));
}

Distribution ideal_distribution(const CircuitMap& map) {
  return distribution_of(compile_circuit(map.routed, map.assignment));
}

namespace {

struct NoiseSite {
  int op_index;    // which op the Pauli fires after
  double prob;
  bool two_qubit;
};

}  // namespace

ShotResult sample_noisy(const CircuitMap& map, const CalibrationSnapshot& snap,
                        long long shots, uint64_t seed, const NoiseOptions& opt) {
  if (shots < 0) throw std::invalid_argument("sample_noisy: negative shot count");
  CompiledCircuit cc = compile_circuit(map.routed, map.assignment);

  std::vector<NoiseSite> sites;
  for (size_t i = 0; i < cc.ops.size(); ++i) {
    const auto& op = cc.ops[i];
    if (op.kind == GateKind::RZ) continue;  // virtual, noise-free
    if (op.kind == GateKind::CX)
      sites.push_back({static_cast<int>(i), snap.edge_err(op.phys0, op.phys1), true});
    else
      sites.push_back({static_cast<int>(i), snap.err_1q[op.phys0], false});
  }
  std::vector<double> readout_err;
  readout_err.reserve(cc.readout.size());
  for (const auto& [lq, cbit] : cc.readout) {
    (void)cbit;
    int phys = -1;
    for (int p = 0; p < static_cast<int>(cc.local_of_phys.size()); ++p)
      if (cc.local_of_phys[p] == lq) phys = p;
    readout_err.push_back(snap.err_readout[phys]);
  }
  std::vector<double> decay_prob(cc.ops.size(), 0.0);
  if (opt.idle_decay) {
    for (size_t i = 0; i < cc.ops.size(); ++i) {
      const auto& op = cc.ops[i];
      if (op.kind == GateKind::RZ) continue;
      double dur_us = (op.kind == GateKind::CX ? snap.dur_2q_ns : snap.dur_1q_ns) / 1000.0;
      decay_prob[i] = 1.0 - std::exp(-dur_us / snap.t1_us[op.phys0]);
    }
  }

  // Noiseless prefix states: prefix[i] = state after the first i ops. A shot
  // whose first fault hits op j resumes from prefix[j+1] instead of
  // re-evolving the whole circuit.
  std::vector<StateVector> prefix;
  prefix.reserve(cc.ops.size() + 1);
  prefix.emplace_back(cc.n_local);
  for (size_t i = 0; i < cc.ops.size(); ++i) {
    prefix.push_back(prefix.back());
    cc.apply_op(prefix.back(), cc.ops[i]);
  }

  // cumulative distribution of a final state, for inverse-CDF outcome draws
  auto cumulative = [](const StateVector& sv) {
    std::vector<double> cum(sv.amp.size());
    double acc = 0;
    for (size_t b = 0; b < sv.amp.size(); ++b) {
      acc += std::norm(sv.amp[b]);
      cum[b] = acc;
    }
    return cum;
  };
  std::vector<double> noiseless_cum = cumulative(prefix.back());

  // Event list of one shot: (op index, pauli code) pairs, in circuit order.
  // Shots sharing an event list share a final distribution, so each distinct
  // pattern is evolved once. Decay events depend on the quantum state, so
  // with idle_decay on only the fault-free fast path is shared.
  using Pattern = std::vector<std::pair<int, int>>;
  std::map<Pattern, int> pattern_ids;
  std::vector<Pattern> patterns;
  std::vector<std::vector<double>> pattern_cum;

  struct ShotPlan {
    int pattern = -1;  // -1: fault-free
    double u_out = 0;
    uint64_t flips = 0;
    uint64_t rng_rewind = 0;  // seed to replay state-dependent shots
    bool replay = false;
  };

  ShotResult result;
  result.total = shots;
  for (long long s = 0; s < shots; ++s) {
    uint64_t shot_seed = mix_seed(seed, static_cast<uint64_t>(s));
    Rng rng(shot_seed);
    Pattern pattern;
    bool has_decay = false;
    for (size_t k = 0; k < sites.size(); ++k) {
      const NoiseSite& site = sites[k];
      double u = rng.next_double();
      if (u < site.prob) {
        int pauli = site.two_qubit ? 1 + static_cast<int>(rng.next_index(15))
                                   : 1 + static_cast<int>(rng.next_index(3));
        pattern.emplace_back(site.op_index, pauli);
      }
      if (opt.idle_decay && decay_prob[site.op_index] > 0) {
        double ud = rng.next_double();
        if (ud < decay_prob[site.op_index]) {
          pattern.emplace_back(site.op_index, -1);  // decay marker
          rng.next_double();                        // collapse draw, replayed below
          has_decay = true;
        }
      }
    }
    double u_out = rng.next_double();
    uint64_t flips = 0;
    for (size_t r = 0; r < cc.readout.size(); ++r) {
      double uf = rng.next_double();
      if (uf < readout_err[r]) flips |= uint64_t(1) << cc.readout[r].second;
    }

    std::string key;
    if (pattern.empty()) {
      size_t basis = std::upper_bound(noiseless_cum.begin(), noiseless_cum.end(),
                                      u_out * noiseless_cum.back()) -
                     noiseless_cum.begin();
      basis = std::min(basis, noiseless_cum.size() - 1);
      key = outcome_key(cc, basis, flips);
    } else if (has_decay) {
      // State-dependent trajectory: replay the shot draw-for-draw with the
      // same sub-stream, evolving the state alongside.
      Rng replay(shot_seed);
      StateVector sv(cc.n_local);
      size_t site_idx = 0;
      for (size_t i = 0; i < cc.ops.size(); ++i) {
        cc.apply_op(sv, cc.ops[i]);
        if (site_idx < sites.size() &&
            sites[site_idx].op_index == static_cast<int>(i)) {
          const NoiseSite& site = sites[site_idx];
          double u = replay.next_double();
          if (u < site.prob) {
            if (site.two_qubit) {
              int k = 1 + static_cast<int>(replay.next_index(15));
              sv.apply_pauli(k / 4, cc.ops[i].q0);
              sv.apply_pauli(k % 4, cc.ops[i].q1);
            } else {
              int k = 1 + static_cast<int>(replay.next_index(3));
              sv.apply_pauli(k, cc.ops[i].q0);
            }
          }
          if (opt.idle_decay && decay_prob[i] > 0) {
            double ud = replay.next_double();
            if (ud < decay_prob[i]) {
              double uc = replay.next_double();
              double p1 = sv.prob_one(cc.ops[i].q0);
              if (uc < p1) {
                sv.collapse(cc.ops[i].q0, 1, p1);
                sv.apply_x(cc.ops[i].q0);  // decayed to |0>
              } else {
                sv.collapse(cc.ops[i].q0, 0, 1.0 - p1);
              }
            }
          }
          ++site_idx;
        }
      }
      std::vector<double> cum = cumulative(sv);
      size_t basis = std::upper_bound(cum.begin(), cum.end(), u_out * cum.back()) - cum.begin();
      basis = std::min(basis, cum.size() - 1);
      key = outcome_key(cc, basis, flips);
    } else {
      auto [it, fresh] = pattern_ids.try_emplace(pattern, static_cast<int>(patterns.size()));
      if (fresh) {
        patterns.push_back(pattern);
        // evolve once: resume from the prefix before the first fault
        int first_op = pattern.front().first;
        StateVector sv = prefix[first_op + 1];
        size_t ev = 0;
        for (size_t i = static_cast<size_t>(first_op); i < cc.ops.size(); ++i) {
          if (i != static_cast<size_t>(first_op)) cc.apply_op(sv, cc.ops[i]);
          while (ev < pattern.size() && pattern[ev].first == static_cast<int>(i)) {
            int pauli = pattern[ev].second;
            if (cc.ops[i].kind == GateKind::CX) {
              sv.apply_pauli(pauli / 4, cc.ops[i].q0);
              sv.apply_pauli(pauli % 4, cc.ops[i].q1);
            } else {
              sv.apply_pauli(pauli, cc.ops[i].q0);
            }
            ++ev;
          }
        }
        pattern_cum.push_back(cumulative(sv));
      }
      const std::vector<double>& cum = pattern_cum[it->second];
      size_t basis = std::upper_bound(cum.begin(), cum.end(), u_out * cum.back()) - cum.begin();
      basis = std::min(basis, cum.size() - 1);
      key = outcome_key(cc, basis, flips);
    }
    result.counts[key] += 1;
  }
  return result;
}

double esp(const CircuitMap& map, const CalibrationSnapshot& snap) {
  double product = 1.0;
  for (const Gate& g : map.routed.gates) {
    switch (g.kind) {
      case GateKind::RZ: break;  // virtual
      case GateKind::Measure: product *= 1.0 - snap.err_readout[g.qubits[0]]; break;
      case GateKind::CX: product *= 1.0 - snap.edge_err(g.qubits[0], g.qubits[1]); break;
      default: product *= 1.0 - snap.err_1q[g.qubits[0]]; break;
    }
  }
  return product;
}

}  // namespace anchor
