#include "walklab/closedform.hpp"

#include <math.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace walklab {

namespace {

double lgamma_safe(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

// Geometric block r^k for k >= 0, with 0^0 = 1.
double geom(double r, std::int64_t k) {
  return std::pow(r, static_cast<double>(k));
}

}  // namespace

double log_binomial(double n, double k) {
  if (k < 0 || k > n) return -INFINITY;
  return lgamma_safe(n + 1.0) - lgamma_safe(k + 1.0) - lgamma_safe(n - k + 1.0);
}

double first_return_pmf(const WalkParams& params, std::int64_t n) {
  require(n >= 1, "first_return_pmf: n must be >= 1");
  const double nn = static_cast<double>(n);
  const double lg = log_binomial(2.0 * nn, nn) - std::log(2.0 * nn - 1.0) +
                    nn * std::log(params.p * params.q);
  return std::exp(lg);
}

ReturnTail return_tail(const WalkParams& params, std::int64_t n) {
  require(n >= 1, "return_tail: n must be >= 1");
  const double q = params.q;
  const double rho = 4.0 * params.p * q;
  // The ratio of consecutive first-return terms increases to rho, so the mass
  // beyond term m is at most term_m * rho / (1 - rho).
  const std::int64_t first = (n + 1) / 2;  // smallest m with 2m >= n
  double partial = 0.0;
  double comp = 0.0;
  for (std::int64_t m = 1; m < first; ++m) {
    const double t = first_return_pmf(params, m);
    const double s = partial + t;
    comp += std::abs(partial) >= std::abs(t) ? (partial - s) + t : (t - s) + partial;
    partial = s;
  }
  partial += comp;

  double tail = 2.0 * q - partial;
  // Past the cancellation floor the direct forward sum is the accurate route.
  if (tail < 1e-6) {
    double direct = 0.0;
    for (std::int64_t m = first; m < first + 50'000'000; ++m) {
      const double t = first_return_pmf(params, m);
      direct += t;
      if (t * rho / (1.0 - rho) <= 1e-18 * direct || t == 0.0) break;
    }
    tail = direct;
  }
  if (tail < 0.0) tail = 0.0;

  ReturnTail r;
  r.tail = tail;
  r.gamma0_n = 1.0 - (2.0 * q - tail);
  r.q_n = q - 0.5 * tail;
  return r;
}

double hitting_prob(const WalkParams& params, std::int64_t z) {
  if (z < 0) return geom(params.h, -z);
  if (z == 0) return 2.0 * params.q;
  return 1.0;
}

double green(const WalkParams& params, std::int64_t z) {
  const double g = 1.0 / (params.p - params.q);
  return z <= 0 ? g * geom(params.h, -z) : g;
}

PmfTable local_time_pmf(const WalkParams& params, std::int64_t z,
                        std::int64_t kmax) {
  require(kmax >= 0, "local_time_pmf: kmax must be >= 0");
  const double r = 2.0 * params.q;
  const double esc = 1.0 - r;
  PmfTable t;
  if (z == 0) {
    for (std::int64_t k = 0; k <= kmax; ++k) t.push(k, geom(r, k) * esc);
    t.tail_bound = geom(r, kmax + 1);
  } else if (z > 0) {
    for (std::int64_t k = 1; k <= kmax; ++k) t.push(k, geom(r, k - 1) * esc);
    t.tail_bound = geom(r, kmax);
  } else {
    const double hz = geom(params.h, -z);
    t.push(0, 1.0 - hz);
    for (std::int64_t k = 1; k <= kmax; ++k) {
      t.push(k, hz * geom(r, k - 1) * esc);
    }
    t.tail_bound = hz * geom(r, kmax);
  }
  return t;
}

double gambler_ruin(const WalkParams& params, std::int64_t a, std::int64_t b,
                    std::int64_t c) {
  if (!(0 <= a && a < b && b < c)) {
    std::ostringstream os;
    os << "gambler_ruin: levels must satisfy 0 <= a < b < c (got " << a << ", "
       << b << ", " << c << ")";
    throw ValidationError(os.str());
  }
  const double h = params.h;
  return 1.0 - (1.0 - geom(h, b - a)) / (1.0 - geom(h, c - a));
}

ExcursionLaw excursion_law(const WalkParams& params, std::int64_t z) {
  require(z >= 1, "excursion_law: z must be >= 1");
  const double h = params.h;
  const double hz = geom(h, z);
  ExcursionLaw e;
  e.Pz = params.p * (1.0 - h) / (1.0 - hz);
  e.Qz = 1.0 - e.Pz;
  e.s_pos = e.Pz;
  e.s_neg = hz * e.Pz;
  e.q_pos = e.Qz;
  e.q_neg = e.Qz;
  return e;
}

ExcursionVisits excursion_visits_pmf(const WalkParams& params, std::int64_t z,
                                     std::int64_t jmax) {
  require(jmax >= 0, "excursion_visits_pmf: jmax must be >= 0");
  const ExcursionLaw e = excursion_law(params, z);
  const double hz = geom(params.h, z);
  const double esc = 1.0 - 2.0 * params.q;

  ExcursionVisits out;
  out.finite_return.law_mass = 2.0 * params.q;
  out.finite_return.push(0, e.Qz);
  for (std::int64_t j = 1; j <= jmax; ++j) {
    out.finite_return.push(j, hz * e.Pz * e.Pz * geom(e.Qz, j - 1));
  }
  out.finite_return.tail_bound = hz * e.Pz * geom(e.Qz, jmax);

  out.escape_pos.law_mass = esc;
  for (std::int64_t j = 1; j <= jmax; ++j) {
    out.escape_pos.push(j, esc * e.Pz * geom(e.Qz, j - 1));
  }
  out.escape_pos.tail_bound = esc * geom(e.Qz, jmax);

  out.escape_neg.law_mass = esc;
  out.escape_neg.push(0, esc);
  out.escape_neg.tail_bound = 0.0;
  return out;
}

double joint_transform_radius(const WalkParams& params, std::int64_t z) {
  return -std::log(excursion_law(params, z).Qz);
}

namespace {

constexpr double kRadiusGuard = 1e-9;

void check_radius(const WalkParams& params, std::int64_t z, double v) {
  const double radius = joint_transform_radius(params, z);
  if (!(v < radius - kRadiusGuard)) {
    std::ostringstream os;
    os << "joint transform diverges: v = " << v << " must be below "
       << radius << " for z = " << z;
    throw DomainError(os.str());
  }
}

}  // namespace

double joint_transform(const WalkParams& params, std::int64_t z,
                       std::int64_t k, double v, Side side) {
  require(z >= 1, "joint_transform: z must be >= 1");
  require(k >= 0, "joint_transform: k must be >= 0");
  check_radius(params, z, v);
  const double q = params.q;
  const double hz = geom(params.h, z);
  const double esc = 1.0 - 2.0 * q;
  const double e = std::expm1(v);
  const double den = 1.0 - (2.0 * q - hz) / esc * e;
  const double phi = (1.0 - (4.0 * q * q - hz) / (2.0 * q * esc) * e) / den;
  const double psi = std::exp(v) / den;
  const double base = esc * geom(2.0 * q * phi, k);
  return side == Side::Positive ? base * psi : base;
}

double reversed_joint_transform(const WalkParams& params, std::int64_t z,
                                std::int64_t k, double v, Side side) {
  require(z >= 1, "reversed_joint_transform: z must be >= 1");
  require(k >= 0, "reversed_joint_transform: k must be >= 0");
  check_radius(params, z, v);
  const ExcursionLaw e = excursion_law(params, z);
  const double hz = geom(params.h, z);
  const double esc = 1.0 - 2.0 * params.q;
  const double ev = std::exp(v);
  const double finite_mgf = e.Qz + hz * e.Pz * e.Pz * ev / (1.0 - e.Qz * ev);
  // The reversed walk drifts to -infinity: its escaping excursion sweeps -z.
  const double escape_mgf = side == Side::Negative
                                ? esc * ev * e.Pz / (1.0 - e.Qz * ev)
                                : esc;
  return geom(finite_mgf, k) * escape_mgf;
}

PmfTable two_point_occupation_pmf(const WalkParams& params, std::int64_t z,
                                  Side side, std::int64_t kmax) {
  require(z >= 1, "two_point_occupation_pmf: z must be >= 1");
  require(kmax >= 0, "two_point_occupation_pmf: kmax must be >= 0");
  const double q = params.q;
  const double t = half_power_h(params, static_cast<int>(z));
  const double a = (2.0 * q + t) / (1.0 + t);
  const double b = (2.0 * q - t) / (1.0 - t);
  const double esc = 1.0 - 2.0 * q;
  PmfTable out;
  if (side == Side::Positive) {
    const double c = esc / (2.0 * t);
    for (std::int64_t k = 1; k <= kmax; ++k) {
      out.push(k, c * (geom(a, k) - geom(b, k)));
    }
    out.tail_bound =
        c * (geom(a, kmax + 1) / (1.0 - a) - geom(b, kmax + 1) / (1.0 - b));
    if (kmax == 0) out.tail_bound = 1.0;
  } else {
    const double c = esc / 2.0;
    for (std::int64_t k = 0; k <= kmax; ++k) {
      out.push(k, c * (geom(a, k) + geom(b, k)));
    }
    out.tail_bound =
        c * (geom(a, kmax + 1) / (1.0 - a) + geom(b, kmax + 1) / (1.0 - b));
  }
  return out;
}

double center_sphere_joint_pmf(const WalkParams& params, Start start,
                               std::int64_t K, std::int64_t L) {
  const double p = params.p;
  const double q = params.q;
  const double esc = 1.0 - 2.0 * q;
  const double lp2 = std::log(2.0 * p);
  const double lq = std::log(q);
  const auto out_of_range = [&](const char* rule) {
    std::ostringstream os;
    os << "center_sphere_joint_pmf: (K, L) = (" << K << ", " << L
       << ") violates " << rule;
    throw ValidationError(os.str());
  };
  const double Kd = static_cast<double>(K);
  const double Ld = static_cast<double>(L);
  switch (start) {
    case Start::Origin:
      if (K < 0 || L < K + 1) out_of_range("K >= 0, L >= K + 1");
      return std::exp(log_binomial(Ld - 1.0, Kd) + Kd * lp2 + (Ld - 1.0) * lq) *
             p * esc;
    case Start::Minus:
      if (K < 1 || L < K) out_of_range("K >= 1, L >= K");
      return std::exp(log_binomial(Ld, Kd) + (Kd - 1.0) * lp2 +
                      (Ld - 1.0) * lq) *
             p * p * esc;
    case Start::Plus:
      if (K == 0) {
        if (L < 0) out_of_range("L >= 0");
        return std::exp(Ld * lq) * esc;
      }
      if (K < 0 || L < K) out_of_range("K >= 1, L >= K");
      return std::exp(log_binomial(Ld, Kd) + (Kd - 1.0) * lp2 + Ld * lq) * p *
             esc;
  }
  return 0.0;
}

PmfTable sphere_occupation_pmf(const WalkParams& params, std::int64_t Lmax) {
  require(Lmax >= 1, "sphere_occupation_pmf: Lmax must be >= 1");
  const double p = params.p;
  const double q = params.q;
  const double r = q + 2.0 * p * q;
  PmfTable out;
  for (std::int64_t L = 1; L <= Lmax; ++L) {
    out.push(L, geom(r, L - 1) * p * (1.0 - 2.0 * q));
  }
  out.tail_bound = geom(r, Lmax);
  return out;
}

PmfTable ball_occupation_pmf(const WalkParams& params, std::int64_t lmax) {
  require(lmax >= 1, "ball_occupation_pmf: lmax must be >= 1");
  const double p = params.p;
  const double q = params.q;
  const double beta = std::sqrt(1.0 + 8.0 * p / q);
  // p(1-2q) (q/2)^(l-1) ((1+b)^l - (1-b)^l) / (2b) = c (A^l - B^l)
  const double A = 0.5 * q * (1.0 + beta);
  const double B = 0.5 * q * (1.0 - beta);
  const double c = p * (1.0 - 2.0 * q) / (q * beta);
  PmfTable out;
  for (std::int64_t l = 1; l <= lmax; ++l) {
    out.push(l, c * (geom(A, l) - geom(B, l)));
  }
  out.tail_bound =
      c * (geom(A, lmax + 1) / (1.0 - A) - geom(B, lmax + 1) / (1.0 - B));
  return out;
}

}  // namespace walklab
