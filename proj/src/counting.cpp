// Copyright 2026 The hyperpure Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hyperpure/counting.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace hyperpure {

double db_to_linear(double loss_db) {
  if (!(loss_db >= 0.0) || !std::isfinite(loss_db)) throw std::invalid_argument("db_to_linear: loss must be >= 0 dB");
  return std::pow(10.0, -loss_db / 10.0);
}

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string("DetectionModel: ") + name + " must lie in [0,1]");
}

void require_rate(double r, const char* name) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument(std::string("DetectionModel: ") + name + " must be >= 0");
}

}  // namespace

void DetectionModel::validate() const {
  require_rate(pair_rate, "pair_rate");
  require_rate(dark_rate, "dark_rate");
  require_probability(signal_efficiency, "signal_efficiency");
  require_probability(idler_efficiency, "idler_efficiency");
  require_probability(detector_efficiency, "detector_efficiency");
  if (!(rep_rate > 0.0) || !std::isfinite(rep_rate)) throw std::invalid_argument("DetectionModel: rep_rate must be > 0");
  if (!(coincidence_window > 0.0) || !(coincidence_window < 1.0 / rep_rate))
    throw std::invalid_argument("DetectionModel: coincidence_window must lie in (0, 1/rep_rate)");
  if (pair_rate > rep_rate) throw std::invalid_argument("DetectionModel: at most one pair per pulse on average");
  if (!(multi_pair_xi >= 0.0 && multi_pair_xi < 1.0))
    throw std::invalid_argument("DetectionModel: multi_pair_xi must lie in [0,1)");
}

double DetectionModel::dark_probability() const { return -std::expm1(-dark_rate * coincidence_window); }

DetectionModel DetectionModel::ideal() {
  DetectionModel m;
  m.pair_rate = m.rep_rate;
  return m;
}

DetectionModel DetectionModel::measured_setup() {
  DetectionModel m;
  m.detector_efficiency = 0.9;
  m.signal_efficiency = db_to_linear(24.8) / m.detector_efficiency;
  m.idler_efficiency = db_to_linear(47.0) / m.detector_efficiency;
  m.dark_rate = 200.0;
  m.rep_rate = 9.95e9;
  m.coincidence_window = 50e-12;
  m.pair_rate = calibrate_pair_rate(m, 10.38);
  return m;
}

void SourceParams::validate() const {
  if (!(xi >= 0.0 && xi < 1.0)) throw std::invalid_argument("SourceParams: xi must lie in [0,1)");
  if (!(schmidt_K >= 1.0)) throw std::invalid_argument("SourceParams: K must be >= 1");
}

double raw_coincidence_rate(const DetectionModel& m) {
  return m.pair_rate * m.signal_detection() * m.idler_detection();
}
double signal_singles_rate(const DetectionModel& m) { return m.pair_rate * m.signal_detection() + m.dark_rate; }
double idler_singles_rate(const DetectionModel& m) { return m.pair_rate * m.idler_detection() + m.dark_rate; }

double calibrate_pair_rate(const DetectionModel& m, double coincidence_rate) {
  const double eff = m.signal_detection() * m.idler_detection();
  if (!(eff > 0.0)) throw NumericalError("calibrate_pair_rate: zero detection efficiency");
  if (!(coincidence_rate >= 0.0)) throw std::invalid_argument("calibrate_pair_rate: rate must be >= 0");
  return coincidence_rate / eff;
}

CountingSetup CountingSetup::polarization(const JointDensityMatrix& rho4) {
  if (rho4.signal_dim() != 2 || rho4.idler_dim() != 2)
    throw std::invalid_argument("CountingSetup::polarization expects a two-qubit state");
  CountingSetup s;
  s.state = rho4;
  return s;
}

CountingSetup CountingSetup::hyper(const JointDensityMatrix& rho16, const ChannelMix& noise,
                                   const Matrix4& signal_circuit, const Matrix4& idler_circuit,
                                   Collection collection) {
  if (rho16.signal_dim() != 4 || rho16.idler_dim() != 4)
    throw std::invalid_argument("CountingSetup::hyper expects a 4x4-mode state");
  CountingSetup s;
  s.state = rho16;
  s.noise = noise;
  s.signal_circuit = signal_circuit;
  s.idler_circuit = idler_circuit;
  s.collection = collection;
  return s;
}

namespace {

using Vec2 = Eigen::Vector2cd;

struct Analyzer {
  Vec2 port0, port1;
};

// One measurement setting: an analyzer per photon.
struct Setting {
  Analyzer signal, idler;
};

struct Detector {
  Vector v;
  int group = 0;
  int port = 0;
};

// Outcome probabilities of one setting, categories indexed k * (L + 1) + l with
// k == K (l == L) meaning no click from the pair on that side.
struct Plan {
  std::vector<Detector> sig, idl;
  std::vector<double> branch_weight;
  std::vector<std::vector<double>> branch_cat;
  std::vector<double> mean_cat;
  std::vector<double> cross_cat;  // product of marginals, for multi-pair accidentals
  int K = 0, L = 0;
  int cat(int k, int l) const { return k * (L + 1) + l; }
  int ncat() const { return (K + 1) * (L + 1); }
  bool paired(int k, int l) const { return sig[k].group == idl[l].group; }
};

struct BranchState {
  double weight;
  Matrix rho;
  int d;  // single-photon dimension
};

std::vector<BranchState> branch_states(const CountingSetup& setup) {
  const auto& rho = setup.state;
  if (rho.signal_dim() != rho.idler_dim()) throw std::invalid_argument("CountingSetup: unequal photon dimensions");
  const int d = rho.signal_dim();
  if (d != 2 && d != 4) throw std::invalid_argument("CountingSetup: photon dimension must be 2 or 4");
  auto circuit = [d](const Matrix& c, const char* which) {
    if (c.size() == 0) return Matrix(Matrix::Identity(d, d));
    if (c.rows() != d || c.cols() != d || !is_unitary(c))
      throw std::invalid_argument(std::string("CountingSetup: bad ") + which + " circuit");
    return c;
  };
  const Matrix cs = circuit(setup.signal_circuit, "signal");
  const Matrix ci = circuit(setup.idler_circuit, "idler");
  std::vector<BranchState> out;
  if (d == 2) {
    if (setup.noise.size() != 1 || setup.noise.branches()[0].kind != ErrorKind::none)
      throw std::invalid_argument("CountingSetup: noise channels act on hyperentangled states only");
    const Matrix u = kron(cs, ci);
    out.push_back({1.0, u * rho.matrix() * u.adjoint(), d});
    return out;
  }
  for (const auto& b : setup.noise.branches()) {
    const Matrix u = kron(cs * Matrix(b.signal), ci * Matrix(b.idler));
    out.push_back({b.probability, u * rho.matrix() * u.adjoint(), d});
  }
  return out;
}

std::vector<Detector> detectors(const Analyzer& a, int d, Collection collection, int ports) {
  std::vector<Detector> out;
  auto add = [&](int offset, int group) {
    for (int p = 0; p < ports; ++p) {
      Vector v = Vector::Zero(d);
      const Vec2& s = p == 0 ? a.port0 : a.port1;
      v(offset) = s(0);
      v(offset + 1) = s(1);
      out.push_back({v, group, p});
    }
  };
  if (d == 2) {
    add(0, 0);
  } else if (collection == Collection::first_pair) {
    add(0, 0);
  } else if (collection == Collection::second_pair) {
    add(2, 0);
  } else {
    add(0, 0);
    add(2, 1);
  }
  return out;
}

Plan make_plan(const std::vector<BranchState>& branches, const Setting& setting, const DetectionModel& model,
               Collection collection, int ports) {
  const int d = branches.front().d;
  Plan p;
  p.sig = detectors(setting.signal, d, collection, ports);
  p.idl = detectors(setting.idler, d, collection, ports);
  p.K = static_cast<int>(p.sig.size());
  p.L = static_cast<int>(p.idl.size());
  const double es = model.signal_detection();
  const double ei = model.idler_detection();
  p.mean_cat.assign(p.ncat(), 0.0);
  std::vector<double> us(p.K + 1, 0.0), ui(p.L + 1, 0.0);
  for (const auto& b : branches) {
    // Landing probabilities before efficiencies.
    std::vector<double> q(p.ncat(), 0.0);
    Matrix rs = Matrix::Zero(d, d), ri = Matrix::Zero(d, d);
    for (int x = 0; x < d; ++x)
      for (int y = 0; y < d; ++y)
        for (int z = 0; z < d; ++z) {
          rs(x, y) += b.rho(x * d + z, y * d + z);
          ri(x, y) += b.rho(z * d + x, z * d + y);
        }
    std::vector<double> ms(p.K), mi(p.L);
    for (int k = 0; k < p.K; ++k) ms[k] = std::max(0.0, p.sig[k].v.dot(rs * p.sig[k].v).real());
    for (int l = 0; l < p.L; ++l) mi[l] = std::max(0.0, p.idl[l].v.dot(ri * p.idl[l].v).real());
    for (int k = 0; k < p.K; ++k)
      for (int l = 0; l < p.L; ++l) {
        const Vector w = kron(Matrix(p.sig[k].v), Matrix(p.idl[l].v));
        q[p.cat(k, l)] = std::max(0.0, w.dot(b.rho * w).real());
      }
    double landed = 0.0;
    for (int k = 0; k < p.K; ++k) {
      double s = 0.0;
      for (int l = 0; l < p.L; ++l) s += q[p.cat(k, l)];
      q[p.cat(k, p.L)] = std::max(0.0, ms[k] - s);
      landed += ms[k];
    }
    for (int l = 0; l < p.L; ++l) {
      double s = 0.0;
      for (int k = 0; k < p.K; ++k) s += q[p.cat(k, l)];
      q[p.cat(p.K, l)] = std::max(0.0, mi[l] - s);
      landed += q[p.cat(p.K, l)];
    }
    q[p.cat(p.K, p.L)] = std::max(0.0, 1.0 - landed);

    // Efficiencies: a landed photon clicks with probability e, else it joins "none".
    std::vector<double> r(p.ncat(), 0.0);
    for (int k = 0; k <= p.K; ++k)
      for (int l = 0; l <= p.L; ++l) {
        const double v = q[p.cat(k, l)];
        const double cs = k < p.K ? es : 0.0;
        const double ci = l < p.L ? ei : 0.0;
        r[p.cat(k, l)] += v * cs * ci;
        r[p.cat(k, p.L)] += v * cs * (1 - ci);
        r[p.cat(p.K, l)] += v * (1 - cs) * ci;
        r[p.cat(p.K, p.L)] += v * (1 - cs) * (1 - ci);
      }
    p.branch_weight.push_back(b.weight);
    p.branch_cat.push_back(r);
    for (int c = 0; c < p.ncat(); ++c) p.mean_cat[c] += b.weight * r[c];
  }
  for (int k = 0; k <= p.K; ++k)
    for (int l = 0; l <= p.L; ++l) {
      us[k] += p.mean_cat[p.cat(k, l)];
      ui[l] += p.mean_cat[p.cat(k, l)];
    }
  p.cross_cat.assign(p.ncat(), 0.0);
  for (int k = 0; k <= p.K; ++k)
    for (int l = 0; l <= p.L; ++l) p.cross_cat[p.cat(k, l)] = us[k] * ui[l];
  return p;
}

struct PortCounts {
  std::array<std::array<uint64_t, 2>, 2> cc{};
  uint64_t signal_singles = 0;
  uint64_t idler_singles = 0;
  PortCounts& operator+=(const PortCounts& o) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) cc[a][b] += o.cc[a][b];
    signal_singles += o.signal_singles;
    idler_singles += o.idler_singles;
    return *this;
  }
};

uint64_t binomial(uint64_t n, double p, Rng& rng) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<long long> dist(static_cast<long long>(n), p);
  return static_cast<uint64_t>(dist(rng));
}

// Sequential conditional binomials; probabilities need not be normalized exactly.
std::vector<uint64_t> multinomial(uint64_t n, const std::vector<double>& probs, Rng& rng) {
  std::vector<uint64_t> out(probs.size(), 0);
  double rest = 0.0;
  for (double p : probs) rest += p;
  for (std::size_t c = 0; c + 1 < probs.size() && n > 0; ++c) {
    const double p = rest > 0.0 ? std::clamp(probs[c] / rest, 0.0, 1.0) : 0.0;
    out[c] = binomial(n, p, rng);
    n -= out[c];
    rest -= probs[c];
  }
  if (!probs.empty()) out.back() += n;
  return out;
}

PortCounts run_block(const Plan& p, const DetectionModel& m, uint64_t pulses, uint64_t seed) {
  Rng rng(seed);
  PortCounts out;
  const double pd = m.dark_probability();
  const double xi2 = m.multi_pair_xi * m.multi_pair_xi;
  const uint64_t n_pairs = binomial(pulses, m.mean_pairs_per_pulse(), rng);
  std::vector<uint64_t> cat(p.ncat(), 0);
  const auto by_branch = multinomial(n_pairs, p.branch_weight, rng);
  for (std::size_t b = 0; b < by_branch.size(); ++b) {
    const auto c = multinomial(by_branch[b], p.branch_cat[b], rng);
    for (int i = 0; i < p.ncat(); ++i) cat[i] += c[i];
  }
  std::vector<std::vector<uint64_t>> coinc(p.K, std::vector<uint64_t>(p.L, 0));
  if (xi2 > 0.0) {
    const uint64_t n_extra = binomial(n_pairs, xi2, rng);
    const auto genuine = multinomial(n_extra, p.mean_cat, rng);
    for (int i = 0; i < p.ncat(); ++i) cat[i] += genuine[i];
    for (int rep = 0; rep < 2; ++rep) {
      const auto cross = multinomial(n_extra, p.cross_cat, rng);
      for (int k = 0; k < p.K; ++k)
        for (int l = 0; l < p.L; ++l) coinc[k][l] += cross[p.cat(k, l)];
    }
  }
  for (int k = 0; k < p.K; ++k)
    for (int l = 0; l < p.L; ++l) coinc[k][l] += cat[p.cat(k, l)];
  for (int k = 0; k <= p.K; ++k)
    for (int l = 0; l <= p.L; ++l) {
      if (k < p.K) out.signal_singles += cat[p.cat(k, l)];
      if (l < p.L) out.idler_singles += cat[p.cat(k, l)];
    }
  if (pd > 0.0) {
    for (int k = 0; k < p.K; ++k)
      for (int l = 0; l < p.L; ++l) {
        coinc[k][l] += binomial(cat[p.cat(k, p.L)], pd, rng);
        coinc[k][l] += binomial(cat[p.cat(p.K, l)], pd, rng);
        coinc[k][l] += binomial(cat[p.cat(p.K, p.L)] + (pulses - n_pairs), pd * pd, rng);
      }
    for (int k = 0; k < p.K; ++k) out.signal_singles += binomial(pulses, pd, rng);
    for (int l = 0; l < p.L; ++l) out.idler_singles += binomial(pulses, pd, rng);
  }
  for (int k = 0; k < p.K; ++k)
    for (int l = 0; l < p.L; ++l)
      if (p.paired(k, l)) out.cc[p.sig[k].port][p.idl[l].port] += coinc[k][l];
  return out;
}

std::array<std::array<double, 2>, 2> expected_ports(const Plan& p, const DetectionModel& m, double pulses) {
  const double pd = m.dark_probability();
  const double xi2 = m.multi_pair_xi * m.multi_pair_xi;
  const double mu = m.mean_pairs_per_pulse();
  std::array<std::array<double, 2>, 2> out{};
  for (int k = 0; k < p.K; ++k)
    for (int l = 0; l < p.L; ++l) {
      if (!p.paired(k, l)) continue;
      const double r = p.mean_cat[p.cat(k, l)];
      double e = mu * (1 + xi2) * r + mu * xi2 * 2.0 * p.cross_cat[p.cat(k, l)];
      e += mu * (1 + xi2) * (p.mean_cat[p.cat(k, p.L)] + p.mean_cat[p.cat(p.K, l)]) * pd;
      e += (1 - mu + mu * (1 + xi2) * p.mean_cat[p.cat(p.K, p.L)]) * pd * pd;
      out[p.sig[k].port][p.idl[l].port] += pulses * e;
    }
  return out;
}

uint64_t pulses_for(const DetectionModel& m, double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("counting: duration must be > 0");
  const double n = std::llround(duration * m.rep_rate);
  if (n < 1.0) throw std::invalid_argument("counting: duration shorter than one pulse");
  return static_cast<uint64_t>(n);
}

std::vector<PortCounts> run_settings(const std::vector<Plan>& plans, const DetectionModel& m, uint64_t pulses,
                                     uint64_t seed, const CountingOptions& opt) {
  if (opt.blocks_per_setting < 1) throw std::invalid_argument("counting: blocks_per_setting must be >= 1");
  const uint64_t nb = std::min<uint64_t>(static_cast<uint64_t>(opt.blocks_per_setting), pulses);
  const long long jobs = static_cast<long long>(plans.size() * nb);
  std::vector<PortCounts> partial(static_cast<std::size_t>(jobs));
  auto one = [&](long long j) {
    const uint64_t s = static_cast<uint64_t>(j) / nb;
    const uint64_t b = static_cast<uint64_t>(j) % nb;
    const uint64_t n = pulses / nb + (b < pulses % nb ? 1 : 0);
    partial[j] = run_block(plans[s], m, n, substream_seed(seed, s, b));
  };
  if (opt.exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long j = 0; j < jobs; ++j) one(j);
  } else {
    for (long long j = 0; j < jobs; ++j) one(j);
  }
  std::vector<PortCounts> out(plans.size());
  for (long long j = 0; j < jobs; ++j) out[static_cast<uint64_t>(j) / nb] += partial[j];
  return out;
}

// Basis index (Z, X, Y) and port of a polarization label.
std::pair<int, int> basis_port(char c) {
  switch (c) {
    case 'H': return {0, 0};
    case 'V': return {0, 1};
    case 'D': return {1, 0};
    case 'A': return {1, 1};
    case 'R': return {2, 0};
    case 'L': return {2, 1};
    default: throw std::invalid_argument(std::string("counting: unknown label '") + c + "'");
  }
}

Analyzer basis_analyzer(int basis) {
  static const char first[3] = {'H', 'D', 'R'};
  static const char second[3] = {'V', 'A', 'L'};
  return {polarization_state(first[basis]), polarization_state(second[basis])};
}

Analyzer single_analyzer(char c) { return {polarization_state(c), Vec2::Zero()}; }

Analyzer linear_analyzer(double deg) {
  const double x = deg * kPi / 180.0;
  return {linear_polarization(x), linear_polarization(x + kPi / 2)};
}

// Settings and the (setting, port, port) source of every table entry.
struct TomographyLayout {
  std::vector<Setting> settings;
  std::array<std::array<int, 3>, 16> source{};
  int ports = 1;
};

TomographyLayout tomography_layout(const TomographyBasisSet& basis, DetectorScheme scheme) {
  TomographyLayout lay;
  const auto& labels = basis.labels();
  if (scheme == DetectorScheme::two_detector) {
    for (int nu = 0; nu < 16; ++nu) {
      lay.settings.push_back({single_analyzer(labels[nu][0]), single_analyzer(labels[nu][1])});
      lay.source[nu] = {nu, 0, 0};
    }
    return lay;
  }
  lay.ports = 2;
  std::vector<std::pair<int, int>> pairs;
  for (int nu = 0; nu < 16; ++nu) {
    const auto [bs, ps] = basis_port(labels[nu][0]);
    const auto [bi, pi] = basis_port(labels[nu][1]);
    auto it = std::find(pairs.begin(), pairs.end(), std::pair{bs, bi});
    if (it == pairs.end()) {
      pairs.emplace_back(bs, bi);
      lay.settings.push_back({basis_analyzer(bs), basis_analyzer(bi)});
      it = pairs.end() - 1;
    }
    lay.source[nu] = {static_cast<int>(it - pairs.begin()), ps, pi};
  }
  return lay;
}

std::vector<Plan> plans_for(const CountingSetup& setup, const std::vector<Setting>& settings,
                            const DetectionModel& model, int ports) {
  const auto branches = branch_states(setup);
  std::vector<Plan> plans;
  plans.reserve(settings.size());
  for (const auto& s : settings) plans.push_back(make_plan(branches, s, model, setup.collection, ports));
  return plans;
}

}  // namespace

CoincidenceTable simulate_counts(const CountingSetup& setup, const TomographyBasisSet& basis,
                                 const DetectionModel& model, double duration, uint64_t seed,
                                 const CountingOptions& options) {
  model.validate();
  const uint64_t pulses = pulses_for(model, duration);
  const auto lay = tomography_layout(basis, options.scheme);
  const auto plans = plans_for(setup, lay.settings, model, lay.ports);
  const auto counts = run_settings(plans, model, pulses, seed, options);
  CoincidenceTable t = CoincidenceTable::for_basis(basis);
  t.integration_time = duration;
  for (int nu = 0; nu < 16; ++nu) {
    const auto& [s, a, b] = lay.source[nu];
    t.counts[nu] = counts[s].cc[a][b];
  }
  return t;
}

std::array<double, 16> expected_counts(const CountingSetup& setup, const TomographyBasisSet& basis,
                                       const DetectionModel& model, double duration, DetectorScheme scheme) {
  model.validate();
  const double pulses = static_cast<double>(pulses_for(model, duration));
  const auto lay = tomography_layout(basis, scheme);
  const auto plans = plans_for(setup, lay.settings, model, lay.ports);
  std::array<double, 16> out{};
  for (int nu = 0; nu < 16; ++nu) {
    const auto& [s, a, b] = lay.source[nu];
    out[nu] = expected_ports(plans[s], model, pulses)[a][b];
  }
  return out;
}

ChshCounts simulate_chsh_counts(const CountingSetup& setup, const ChshSettings& settings,
                                const DetectionModel& model, double duration, uint64_t seed,
                                const CountingOptions& options) {
  model.validate();
  const uint64_t pulses = pulses_for(model, duration);
  ChshCounts out;
  if (options.scheme == DetectorScheme::two_detector) {
    const auto pairs = chsh_angle_pairs(settings);
    std::vector<Setting> list;
    for (const auto& [x, y] : pairs) list.push_back({linear_analyzer(x), linear_analyzer(y)});
    const auto counts = run_settings(plans_for(setup, list, model, 1), model, pulses, seed, options);
    for (int k = 0; k < 4; ++k) {
      out.terms[k].ab = counts[k * 4 + 0].cc[0][0];
      out.terms[k].ab_perp = counts[k * 4 + 1].cc[0][0];
      out.terms[k].aperp_b = counts[k * 4 + 2].cc[0][0];
      out.terms[k].aperp_bperp = counts[k * 4 + 3].cc[0][0];
    }
    return out;
  }
  const std::array<std::pair<double, double>, 4> terms = {
      std::pair{settings.a, settings.b}, {settings.a, settings.b_prime}, {settings.a_prime, settings.b},
      {settings.a_prime, settings.b_prime}};
  std::vector<Setting> list;
  for (const auto& [x, y] : terms) list.push_back({linear_analyzer(x), linear_analyzer(y)});
  const auto counts = run_settings(plans_for(setup, list, model, 2), model, pulses, seed, options);
  for (int k = 0; k < 4; ++k) {
    out.terms[k].ab = counts[k].cc[0][0];
    out.terms[k].ab_perp = counts[k].cc[0][1];
    out.terms[k].aperp_b = counts[k].cc[1][0];
    out.terms[k].aperp_bperp = counts[k].cc[1][1];
  }
  return out;
}

double car_formula(double xi, double a) {
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("car_formula: xi must lie in (0,1)");
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("car_formula: a must lie in [0,1]");
  const double x = xi * xi;
  const double inv = (1 - a * a * x) * x / ((1 + a * x) * (1 - a * x));
  return 1.0 / inv;
}

double car_from_model(const DetectionModel& model, double xi) {
  model.validate();
  const double eta = std::sqrt(model.signal_detection() * model.idler_detection());
  return car_formula(xi, 1.0 - eta);
}

double xi_from_car(double car, double a) {
  if (!(car > 1.0) || !std::isfinite(car)) throw std::invalid_argument("xi_from_car: CAR must be > 1");
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("xi_from_car: a must lie in [0,1]");
  // 1/CAR rises monotonically from 0 as xi leaves 0; bracket the root below the
  // largest xi the formula stays finite and increasing at.
  auto f = [&](double xi) { return 1.0 / car_formula(xi, a) - 1.0 / car; };
  double lo = 1e-12, hi = 1.0 - 1e-12;
  if (f(lo) > 0.0 || !(f(hi) >= 0.0)) throw NumericalError("xi_from_car: no root in (0,1)");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double CarMeasurement::car() const {
  if (adjacent == 0) throw NumericalError("CAR: no accidental coincidences recorded");
  return static_cast<double>(central) / static_cast<double>(adjacent);
}

CarMeasurement simulate_car(const DetectionModel& model, double xi, uint64_t pulses, uint64_t seed,
                            Execution exec) {
  model.validate();
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("simulate_car: xi must lie in (0,1)");
  if (pulses < 2) throw std::invalid_argument("simulate_car: need at least two pulses");
  const int blocks = static_cast<int>(std::min<uint64_t>(64, pulses / 2));
  const double es = model.signal_detection();
  const double ei = model.idler_detection();
  const double pd = model.dark_probability();
  std::vector<CarMeasurement> part(static_cast<std::size_t>(blocks));
  auto one = [&](int b) {
    Rng rng(substream_seed(seed, 0x4341u, static_cast<uint64_t>(b)));
    const uint64_t n = pulses / blocks + (static_cast<uint64_t>(b) < pulses % blocks ? 1 : 0);
    std::geometric_distribution<int> thermal(1.0 - xi * xi);
    std::bernoulli_distribution dark(pd);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool prev_signal = false;
    CarMeasurement m;
    m.pulses = n;
    for (uint64_t j = 0; j < n; ++j) {
      const int pairs = thermal(rng);
      bool s = false, i = false;
      if (pairs > 0) {
        s = u(rng) < 1.0 - std::pow(1.0 - es, pairs);
        i = u(rng) < 1.0 - std::pow(1.0 - ei, pairs);
      }
      if (pd > 0.0) {
        s = dark(rng) || s;
        i = dark(rng) || i;
      }
      if (s && i) ++m.central;
      if (prev_signal && i) ++m.adjacent;
      prev_signal = s;
    }
    part[b] = m;
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (int b = 0; b < blocks; ++b) one(b);
  } else {
    for (int b = 0; b < blocks; ++b) one(b);
  }
  CarMeasurement total;
  for (const auto& m : part) {
    total.central += m.central;
    total.adjacent += m.adjacent;
    total.pulses += m.pulses;
  }
  return total;
}

SpectralPurity purity_from_g2(double g2) {
  if (!(g2 > 1.0 && g2 <= 2.0)) throw std::invalid_argument("purity_from_g2: g2 must lie in (1,2]");
  SpectralPurity s;
  s.schmidt_K = 1.0 / (g2 - 1.0);
  s.purity = g2 - 1.0;
  return s;
}

double g2_adjacent_corrected(double central, double left, double right, double reference) {
  if (!(reference > 0.0)) throw NumericalError("g2 correction: reference peak must be positive");
  if (central < 0 || left < 0 || right < 0) throw std::invalid_argument("g2 correction: negative counts");
  return (central + (left - reference) + (right - reference)) / reference;
}

}  // namespace hyperpure
