#include "phase_engine/wigner.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "phase_engine/parallel.hpp"

namespace phase_engine {

namespace {

// Stable for any real argument, unlike the library special function.
double laguerre_poly(int n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0, cur = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

Mat2 inverse2(const Mat2& a, double& det) {
  det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (!(det > 0.0)) throw std::invalid_argument("covariance must be positive definite");
  Mat2 inv;
  inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return inv / det;
}

Vec2 cat_displacement(const CatState& cat, const SystemParams& params) {
  const double mw = params.mass * params.omega0;
  return {std::sqrt(2.0 / mw) * cat.alpha_re, std::sqrt(2.0 * mw) * cat.alpha_im};
}

// Linear phase-space channel: z -> phi z plus Gaussian noise.
struct Channel {
  bool resonant = true;
  Complex u = 1.0;
  double v = 0.0;
  Mat2 phi = Mat2::Identity();
  Mat2 noise = Mat2::Zero();
};

Channel channel_at(const PropagatorRecord& record, const SystemParams& params, double t) {
  const int k = record.index_of_time(t);
  Channel ch;
  if (record.kind == PropagatorRecord::Kind::resonant) {
    ch.resonant = true;
    ch.u = record.u[k];
    ch.v = record.v[k];
    ch.phi = resonant_phi(ch.u, params);
    const double fill = 1.0 + 2.0 * ch.v - std::norm(ch.u);
    ch.noise = fill * vacuum_covariance(params).matrix();
  } else {
    ch.resonant = false;
    ch.phi = record.phi[k];
    ch.noise = record.noise[k];
  }
  return ch;
}

EvolvedCat build_cat(const CatState& cat, const Channel& ch, const SystemParams& params) {
  if (cat.parity != 1 && cat.parity != -1) throw std::invalid_argument("cat parity must be +1 or -1");
  const double a2 = cat.alpha_re * cat.alpha_re + cat.alpha_im * cat.alpha_im;
  const double cross = static_cast<double>(cat.parity) * std::exp(-2.0 * a2);
  const double norm = 2.0 * (1.0 + cross);
  if (norm < 1e-12) throw std::invalid_argument("cat state norm vanishes");

  const Mat2 a0 = vacuum_covariance(params).matrix();
  const Vec2 z_alpha = cat_displacement(cat, params);
  Mat2 j2;
  j2 << 0.0, 1.0, -1.0, 0.0;
  const Vec2 fringe_shift = 2.0 * a0 * j2 * z_alpha;

  EvolvedCat out;
  const Mat2 a_t = ch.phi * a0 * ch.phi.transpose() + ch.noise;
  out.cov = CovarianceMatrix::from_matrix(a_t);
  double det = 0.0;
  const Mat2 inv = inverse2(a_t, det);
  const double log_norm = std::log(2.0 * kPi * std::sqrt(det));

  const Eigen::Vector2cd betas0[4] = {
      -kI * z_alpha.cast<Complex>(), kI * z_alpha.cast<Complex>(),
      fringe_shift.cast<Complex>(), -fringe_shift.cast<Complex>()};
  const Complex coeffs[4] = {1.0 / norm, 1.0 / norm, cross / norm, cross / norm};
  for (int m = 0; m < 4; ++m) {
    if (std::abs(coeffs[m]) < 1e-300) continue;
    CatTerm term;
    term.coeff = coeffs[m];
    term.beta = ch.phi.cast<Complex>() * betas0[m];
    term.bvec = inv.cast<Complex>() * term.beta;
    const Complex quad = term.beta[0] * term.bvec[0] + term.beta[1] * term.bvec[1];
    term.log_prefactor = std::log(term.coeff) + 0.5 * quad - log_norm;
    out.terms.push_back(term);
  }
  return out;
}

EvolvedState make_evolved(const InitialState& initial, const Channel& ch, const SystemParams& params) {
  if (const auto* fock = std::get_if<FockState>(&initial)) {
    if (fock->n < 0) throw std::invalid_argument("fock index must be >= 0");
    if (!ch.resonant) throw std::invalid_argument("number-state initial conditions need the number-conserving coupling");
    return EvolvedState(params, EvolvedFock{fock->n, std::norm(ch.u), ch.v});
  }
  if (std::holds_alternative<CollectiveFockState>(initial))
    throw std::logic_error("collective mode is resolved by the caller");
  if (const auto* cat = std::get_if<CatState>(&initial)) {
    return EvolvedState(params, build_cat(*cat, ch, params));
  }
  const Vec2 mean0 = initial_mean(initial, params);
  const Mat2 cov0 = initial_covariance(initial, params).matrix();
  EvolvedGaussian g;
  g.mean = ch.phi * mean0;
  g.cov = CovarianceMatrix::from_matrix(ch.phi * cov0 * ch.phi.transpose() + ch.noise);
  return EvolvedState(params, g);
}

double fock_weight_sum(int n, double w, int power) {
  // sum_k [C(n,k) w^k (1-w)^(n-k)]^power for power 1 or 2
  double total = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    const double pk = binom * std::pow(w, k) * std::pow(1.0 - w, n - k);
    total += power == 1 ? pk : pk * pk;
    binom *= static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  return total;
}

}  // namespace

InitialState make_collective_fock(const DiscreteBath& bath, const SystemParams& params) {
  const OneExcitationModes modes = solve_one_excitation(bath, params);
  CollectiveFockState state;
  state.amplitudes = modes.vectors.col(0);
  return state;
}

Vec2 initial_mean(const InitialState& state, const SystemParams&) {
  if (const auto* coh = std::get_if<CoherentState>(&state)) return {coh->q_bar, coh->p_bar};
  return Vec2::Zero();
}

CovarianceMatrix initial_covariance(const InitialState& state, const SystemParams& params) {
  if (std::holds_alternative<VacuumState>(state) || std::holds_alternative<CoherentState>(state))
    return vacuum_covariance(params);
  if (const auto* th = std::get_if<ThermalState>(&state)) return thermal_covariance(params, th->n_bar);
  if (const auto* quench = std::get_if<QuenchThermalState>(&state)) {
    if (!(quench->omega_init > 0.0)) throw std::invalid_argument("quench frequency must be positive");
    if (quench->temperature_init < 0.0) throw std::invalid_argument("quench temperature must be >= 0");
    const double mw = params.mass * quench->omega_init;
    const double fill = thermal_coth(quench->omega_init, quench->temperature_init);
    return {fill * 0.5 / mw, 0.0, fill * 0.5 * mw};
  }
  if (const auto* fock = std::get_if<FockState>(&state)) {
    const double f = 1.0 + 2.0 * fock->n;
    CovarianceMatrix c = vacuum_covariance(params);
    return {f * c.qq, 0.0, f * c.pp};
  }
  if (const auto* cat = std::get_if<CatState>(&state)) {
    Channel identity;
    return EvolvedState(params, build_cat(*cat, identity, params)).covariance();
  }
  // Collective mode: one quantum spread over system and bath; the reduced
  // covariance carries the system share c0^2.
  const auto& coll = std::get<CollectiveFockState>(state);
  const double c0sq = coll.amplitudes.size() > 0 ? coll.amplitudes[0] * coll.amplitudes[0] : 0.0;
  const double f = 1.0 + 2.0 * c0sq;
  CovarianceMatrix c = vacuum_covariance(params);
  return {f * c.qq, 0.0, f * c.pp};
}

double EvolvedState::wigner(double q, double p) const {
  const Vec2 z{q, p};
  if (const auto* g = std::get_if<EvolvedGaussian>(&form_)) {
    double det = 0.0;
    const Mat2 inv = inverse2(g->cov.matrix(), det);
    const Vec2 d = z - g->mean;
    return std::exp(-0.5 * d.dot(inv * d)) / (2.0 * kPi * std::sqrt(det));
  }
  if (const auto* f = std::get_if<EvolvedFock>(&form_)) {
    const double mw = params_.mass * params_.omega0;
    const double zeta = 2.0 * mw * q * q + 2.0 * p * p / mw;
    const double fill = 1.0 + 2.0 * f->v;
    const double base = std::exp(-zeta / (2.0 * fill)) / (kPi * fill);
    const double w = f->weight;
    const double split = 2.0 * w - fill;
    if (std::abs(split) < 1e-12 * fill) {
      double poly = 1.0;
      for (int k = 1; k <= f->n; ++k) poly *= w * zeta / (fill * fill) / static_cast<double>(k);
      return base * poly;
    }
    const double eps = 1.0 - 2.0 * w / fill;
    const double arg = w * zeta / (split * fill);
    return base * std::pow(eps, f->n) * laguerre_poly(f->n, arg);
  }
  const auto& cat = std::get<EvolvedCat>(form_);
  double det = 0.0;
  const Mat2 inv = inverse2(cat.cov.matrix(), det);
  const double quad = -0.5 * z.dot(inv * z);
  Complex acc = 0.0;
  for (const CatTerm& term : cat.terms) {
    const Complex phase = kI * (z[0] * term.bvec[0] + z[1] * term.bvec[1]);
    acc += std::exp(term.log_prefactor + phase + quad);
  }
  return acc.real();
}

Vec2 EvolvedState::mean() const {
  if (const auto* g = std::get_if<EvolvedGaussian>(&form_)) return g->mean;
  return Vec2::Zero();
}

CovarianceMatrix EvolvedState::covariance() const {
  if (const auto* g = std::get_if<EvolvedGaussian>(&form_)) return g->cov;
  if (const auto* f = std::get_if<EvolvedFock>(&form_)) {
    const double fill = 1.0 + 2.0 * (f->n * f->weight + f->v);
    CovarianceMatrix c = vacuum_covariance(params_);
    return {fill * c.qq, 0.0, fill * c.pp};
  }
  // <z z^T> = A - sum_m Re[coeff_m beta_m beta_m^T]
  const auto& cat = std::get<EvolvedCat>(form_);
  Mat2 out = cat.cov.matrix();
  for (const CatTerm& term : cat.terms) {
    const Eigen::Matrix2cd outer = term.beta * term.beta.transpose();
    out -= (term.coeff * outer).real();
  }
  return CovarianceMatrix::from_matrix(out);
}

double EvolvedState::occupation() const {
  const CovarianceMatrix c = covariance();
  const Vec2 mu = mean();
  const double mw = params_.mass * params_.omega0;
  return 0.5 * (mw * (c.qq + mu[0] * mu[0]) + (c.pp + mu[1] * mu[1]) / mw) - 0.5;
}

std::optional<double> EvolvedState::closed_form_purity() const {
  if (const auto* g = std::get_if<EvolvedGaussian>(&form_)) return 0.5 / std::sqrt(g->cov.det());
  if (const auto* f = std::get_if<EvolvedFock>(&form_)) {
    if (f->v > 1e-14) return std::nullopt;
    // Zero fill keeps the state a binomial mixture over the Fock ladder.
    return fock_weight_sum(f->n, f->weight, 2);
  }
  return std::nullopt;
}

EvolvedState evolve_state(const InitialState& initial, const PropagatorRecord& record,
                          const SystemParams& params, double t) {
  const Channel ch = channel_at(record, params, t);
  if (const auto* coll = std::get_if<CollectiveFockState>(&initial)) {
    if (record.kind != PropagatorRecord::Kind::resonant)
      throw std::invalid_argument("collective mode needs the number-conserving coupling");
    if (record.temperature > 0.0)
      throw std::invalid_argument("collective mode is only propagated at zero temperature");
    const int n = static_cast<int>(record.response.rows());
    if (coll->amplitudes.size() != n + 1)
      throw std::invalid_argument("collective amplitudes do not match the record's bath size");
    if (std::abs(coll->amplitudes.squaredNorm() - 1.0) > 1e-8)
      throw std::invalid_argument("collective amplitudes must be normalized");
    const int k = record.index_of_time(t);
    // Amplitude for the quantum to be found back in the system mode:
    // the system keeps c0 u(t) and each bath mode feeds back -i c_i I_i(t).
    Complex u_tilde = coll->amplitudes[0] * record.u[k];
    for (int i = 0; i < n; ++i) u_tilde += -kI * coll->amplitudes[i + 1] * record.response(i, k);
    return EvolvedState(params, EvolvedFock{1, std::norm(u_tilde), 0.0});
  }
  return make_evolved(initial, ch, params);
}

EvolvedState state_at_zero(const InitialState& initial, const SystemParams& params) {
  Channel identity;
  if (const auto* coll = std::get_if<CollectiveFockState>(&initial)) {
    if (std::abs(coll->amplitudes.squaredNorm() - 1.0) > 1e-8)
      throw std::invalid_argument("collective amplitudes must be normalized");
    const double c0 = coll->amplitudes.size() > 0 ? coll->amplitudes[0] : 0.0;
    return EvolvedState(params, EvolvedFock{1, c0 * c0, 0.0});
  }
  return make_evolved(initial, identity, params);
}

GridSpec auto_grid(const EvolvedState& state, int n_q, int n_p, double n_sigma) {
  const CovarianceMatrix c = state.covariance();
  const Vec2 mu = state.mean();
  GridSpec spec;
  spec.n_q = n_q;
  spec.n_p = n_p;
  const double half_q = n_sigma * std::sqrt(std::max(c.qq, 0.0));
  const double half_p = n_sigma * std::sqrt(std::max(c.pp, 0.0));
  spec.q_min = mu[0] - half_q;
  spec.q_max = mu[0] + half_q;
  spec.p_min = mu[1] - half_p;
  spec.p_max = mu[1] + half_p;
  return spec;
}

WignerGrid render_wigner(const EvolvedState& state, const GridSpec& spec) {
  if (spec.n_q < 2 || spec.n_p < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
  if (!(spec.q_max > spec.q_min) || !(spec.p_max > spec.p_min))
    throw std::invalid_argument("grid bounds must be increasing");
  WignerGrid grid;
  grid.spec = spec;
  grid.values.resize(static_cast<long>(spec.n_q) * spec.n_p);
  parallel_for(spec.n_q, [&](int iq) {
    const double q = grid.q(iq);
    for (int ip = 0; ip < spec.n_p; ++ip) grid.at(iq, ip) = state.wigner(q, grid.p(ip));
  });
  return grid;
}

WignerGrid wigner_gaussian(const Vec2& mean, const CovarianceMatrix& cov, const GridSpec& spec) {
  if (!cov.positive_definite()) throw std::invalid_argument("covariance must be positive definite");
  return render_wigner(EvolvedState(SystemParams{}, EvolvedGaussian{mean, cov}), spec);
}

WignerGrid wigner_fock(int n, const SystemParams& params, const GridSpec& spec) {
  if (n < 0) throw std::invalid_argument("fock index must be >= 0");
  return render_wigner(EvolvedState(params, EvolvedFock{n, 1.0, 0.0}), spec);
}

EvolvedState asymptotic_state(double c0sq, const SystemParams& params) {
  if (!(c0sq >= 0.0 && c0sq <= 1.0)) throw std::invalid_argument("residue weight must lie in [0, 1]");
  return EvolvedState(params, EvolvedFock{1, c0sq * c0sq, 0.0});
}

WignerGrid asymptotic_wigner(double c0sq, const SystemParams& params, const GridSpec& spec) {
  return render_wigner(asymptotic_state(c0sq, params), spec);
}

Complex rdm_element(const Vec2& mean, const CovarianceMatrix& cov, double x, double y) {
  if (!(cov.qq > 0.0)) throw std::invalid_argument("position variance must be positive");
  const double mix = cov.pp - (0.25 + cov.qp * cov.qp) / cov.qq;
  const Complex half_width = cov.pp + (Complex(0.5, -cov.qp) * Complex(0.5, -cov.qp)) / cov.qq;
  const double xs = x - mean[0], ys = y - mean[0];
  const Complex expo = mix * xs * ys - 0.5 * half_width * xs * xs - 0.5 * std::conj(half_width) * ys * ys +
                       kI * mean[1] * (x - y);
  return std::exp(expo) / std::sqrt(2.0 * kPi * cov.qq);
}

WignerGrid evolve_wigner(const InitialState& initial, const PropagatorRecord& record,
                         const SystemParams& params, double t, const GridSpec& spec) {
  return render_wigner(evolve_state(initial, record, params, t), spec);
}

ObservableSet observables(const WignerGrid& grid, const SystemParams& params) {
  const double cell = grid.dq() * grid.dp();
  const double mw = params.mass * params.omega0;
  double norm = 0.0, energy = 0.0, sq = 0.0;
  for (int iq = 0; iq < grid.spec.n_q; ++iq) {
    const double q = grid.q(iq);
    for (int ip = 0; ip < grid.spec.n_p; ++ip) {
      const double p = grid.p(ip);
      const double w = grid.at(iq, ip);
      norm += w;
      energy += w * 0.5 * (mw * q * q + p * p / mw);
      sq += w * w;
    }
  }
  ObservableSet out;
  out.norm = norm * cell;
  out.occupation = energy * cell - 0.5;
  out.purity = 2.0 * kPi * sq * cell;
  out.norm_ok = std::abs(out.norm - 1.0) <= 1e-3;
  return out;
}

ObservableSet observables(const EvolvedState& state) {
  ObservableSet out;
  out.norm = 1.0;
  out.norm_ok = true;
  out.occupation = state.occupation();
  if (const auto closed = state.closed_form_purity()) {
    out.purity = *closed;
  } else {
    out.purity = observables(render_wigner(state, auto_grid(state)), state.params()).purity;
  }
  return out;
}

FourierFn initial_fourier(const InitialState& state, const SystemParams& params) {
  if (std::holds_alternative<CollectiveFockState>(state))
    throw std::invalid_argument("collective mode has no factorized transform");
  if (const auto* fock = std::get_if<FockState>(&state)) {
    const Mat2 a0 = vacuum_covariance(params).matrix();
    const int n = fock->n;
    return [a0, n](double kq, double kp) -> Complex {
      const Vec2 k{kq, kp};
      const double quad = k.dot(a0 * k);
      return laguerre_poly(n, quad) * std::exp(-0.5 * quad);
    };
  }
  if (const auto* cat = std::get_if<CatState>(&state)) {
    Channel identity;
    const EvolvedCat built = build_cat(*cat, identity, params);
    const Mat2 a0 = vacuum_covariance(params).matrix();
    return [built, a0](double kq, double kp) -> Complex {
      const double quad = kq * (a0(0, 0) * kq + a0(0, 1) * kp) + kp * (a0(1, 0) * kq + a0(1, 1) * kp);
      Complex acc = 0.0;
      for (const CatTerm& term : built.terms)
        acc += term.coeff * std::exp(term.beta[0] * kq + term.beta[1] * kp - 0.5 * quad);
      return acc;
    };
  }
  const Vec2 mu = initial_mean(state, params);
  const Mat2 cov = initial_covariance(state, params).matrix();
  return [mu, cov](double kq, double kp) -> Complex {
    const Vec2 k{kq, kp};
    return std::exp(Complex(-0.5 * k.dot(cov * k), -(k[0] * mu[0] + k[1] * mu[1])));
  };
}

FourierFn evolved_fourier(const InitialState& state, const PropagatorRecord& record,
                          const SystemParams& params, double t) {
  const Channel ch = channel_at(record, params, t);
  const FourierFn base = initial_fourier(state, params);
  const Mat2 phi_t = ch.phi.transpose();
  const Mat2 noise = ch.noise;
  return [base, phi_t, noise](double kq, double kp) -> Complex {
    const Vec2 k{kq, kp};
    const Vec2 kk = phi_t * k;
    return std::exp(-0.5 * k.dot(noise * k)) * base(kk[0], kk[1]);
  };
}

WignerGrid wigner_from_fourier(const FourierFn& transform, double k_bound_q, double k_bound_p,
                               int n_k, const GridSpec& spec) {
  if (n_k < 8) throw std::invalid_argument("transform grid too small");
  const double dkq = 2.0 * k_bound_q / (n_k - 1);
  const double dkp = 2.0 * k_bound_p / (n_k - 1);
  MatrixXcd ft(n_k, n_k);
  VectorXd kq(n_k), kp(n_k);
  for (int a = 0; a < n_k; ++a) {
    kq[a] = -k_bound_q + dkq * a;
    kp[a] = -k_bound_p + dkp * a;
  }
  for (int a = 0; a < n_k; ++a) {
    const double wa = (a == 0 || a == n_k - 1) ? 0.5 : 1.0;
    for (int b = 0; b < n_k; ++b) {
      const double wb = (b == 0 || b == n_k - 1) ? 0.5 : 1.0;
      ft(a, b) = transform(kq[a], kp[b]) * (wa * wb * dkq * dkp / (4.0 * kPi * kPi));
    }
  }
  MatrixXcd eq(n_k, spec.n_q), ep(n_k, spec.n_p);
  WignerGrid grid;
  grid.spec = spec;
  grid.values.resize(static_cast<long>(spec.n_q) * spec.n_p);
  for (int a = 0; a < n_k; ++a)
    for (int iq = 0; iq < spec.n_q; ++iq) eq(a, iq) = std::polar(1.0, kq[a] * grid.q(iq));
  for (int a = 0; a < n_k; ++a)
    for (int ip = 0; ip < spec.n_p; ++ip) ep(a, ip) = std::polar(1.0, kp[a] * grid.p(ip));
  const MatrixXcd result = eq.transpose() * (ft * ep);
  for (int iq = 0; iq < spec.n_q; ++iq)
    for (int ip = 0; ip < spec.n_p; ++ip) grid.at(iq, ip) = result(iq, ip).real();
  return grid;
}

void fourier_bounds(const EvolvedState& state, double& k_bound_q, double& k_bound_p) {
  Mat2 envelope;
  double shift_q = 0.0, shift_p = 0.0;
  double degree = 0.0;
  if (const auto* g = std::get_if<EvolvedGaussian>(&state.form())) {
    envelope = g->cov.matrix();
  } else if (const auto* f = std::get_if<EvolvedFock>(&state.form())) {
    envelope = (1.0 + 2.0 * f->v) * vacuum_covariance(state.params()).matrix();
    degree = static_cast<double>(f->n);
  } else {
    const auto& cat = std::get<EvolvedCat>(state.form());
    envelope = cat.cov.matrix();
    double det = 0.0;
    const Mat2 inv = inverse2(envelope, det);
    for (const CatTerm& term : cat.terms) {
      const Vec2 centre = inv * term.beta.real();
      shift_q = std::max(shift_q, std::abs(centre[0]));
      shift_p = std::max(shift_p, std::abs(centre[1]));
    }
  }
  const double trace = envelope(0, 0) + envelope(1, 1);
  const double det = envelope.determinant();
  const double lambda_min = 0.5 * (trace - std::sqrt(std::max(trace * trace - 4.0 * det, 0.0)));
  const double width = (8.0 + 2.5 * std::sqrt(degree + 1.0)) / std::sqrt(std::max(lambda_min, 1e-300));
  k_bound_q = shift_q + width;
  k_bound_p = shift_p + width;
}

}  // namespace phase_engine
