#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "convexcorr/convex_fn.hpp"
#include "convexcorr/structured.hpp"
#include "convexcorr/subspace.hpp"

namespace convexcorr {

/// A linear map is normcoercive iff its nullspace is trivial.
inline bool is_normcoercive(const LinearMap& a) { return nullspace(a).dim() == 0; }

/// F together with a semidirect decomposition F >= F1 ⊞ F2, where F1 is the
/// coercive, locally-bounded-below part and F2 the bounded-below part.
/// Construction checks the decomposition geometry and spot-checks the
/// domination on random points; the capability flags themselves are read at
/// verdict time so that refusals can name the missing hypothesis.
class DecomposedFn {
 public:
  DecomposedFn(ConvexFn part1, Subspace s1, ConvexFn part2, Subspace s2, ConvexFn whole,
               unsigned spot_check_seed = 0)
      : part1_(std::move(part1)),
        s1_(std::move(s1)),
        part2_(std::move(part2)),
        s2_(std::move(s2)),
        whole_(std::move(whole)) {
    if (s1_.ambient_dim() != s2_.ambient_dim())
      throw AmbientMismatch("DecomposedFn: ambient dims differ");
    SubspaceSum total = sum(s1_, s2_);
    if (!total.is_direct || total.space.dim() != s1_.ambient_dim())
      throw NotDirect("DecomposedFn: S1 + S2 must be a direct decomposition of the space");
    if (part1_.dim() != s1_.dim() || part2_.dim() != s2_.dim())
      throw DimensionMismatch("DecomposedFn: part dims must match subspace dims");
    if (whole_.dim() != s1_.ambient_dim())
      throw DimensionMismatch("DecomposedFn: whole must live on the ambient space");
    spot_check_domination(spot_check_seed);
  }

  const ConvexFn& part1() const { return part1_; }
  const ConvexFn& part2() const { return part2_; }
  const Subspace& S1() const { return s1_; }
  const Subspace& S2() const { return s2_; }
  const ConvexFn& whole() const { return whole_; }
  Eigen::Index ambient_dim() const { return s1_.ambient_dim(); }

  bool caps_hold() const {
    return part1_.caps().coercive && part1_.caps().locally_bounded_below &&
           part2_.caps().bounded_below;
  }

 private:
  // domination F >= F1 ⊞ F2 cannot be verified from oracles; 1e3 random
  // points guard against outright mismatches.
  void spot_check_domination(unsigned seed) const {
    ConvexFn sd = semidirect_sum(part1_, s1_, part2_, s2_);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss;
    for (int k = 0; k < 1000; ++k) {
      Vector x(ambient_dim());
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = 3.0 * gauss(rng);
      double lhs = whole_(x);
      double rhs = sd(x);
      if (rhs == kInf) continue;
      if (lhs < rhs - 1e-7 * std::max(1.0, std::abs(rhs)))
        throw InvariantViolation("DecomposedFn: whole does not dominate part1 ⊞ part2");
    }
  }

  ConvexFn part1_;
  Subspace s1_;
  ConvexFn part2_;
  Subspace s2_;
  ConvexFn whole_;
};

struct CoercivityVerdict {
  enum class Status { Certified, Refused, WitnessFound };

  Status status = Status::Refused;
  std::string reason;  // "capability" or "orthogonality" on refusal
  bool orth1 = false;
  bool orth2 = false;
  /// Z2 = S2_F ∩ S2_G; coercivity holds on any complement of it.
  std::optional<Subspace> family_base;
  /// Orthogonal complement of Z2: the canonical member of the family, and
  /// the certified subspace whenever certification applies. Other
  /// complements exist; this is the one we always report.
  std::optional<Subspace> complement_representative;
  std::optional<Subspace> certified_on;

  bool certified() const { return status == Status::Certified; }
};

/// Coercivity of F + G on complements of S2_F ∩ S2_G. Certification needs
/// both decompositions orthogonal and all capability flags; otherwise the
/// verdict names the missing hypothesis and, for non-orthogonal splits,
/// still reports the family "any complement of S2_F ∩ S2_G" without
/// certifying S1_F + S1_G.
inline CoercivityVerdict sum_coercivity(const DecomposedFn& f, const DecomposedFn& g) {
  if (f.ambient_dim() != g.ambient_dim())
    throw AmbientMismatch("sum_coercivity: ambient dims differ");
  CoercivityVerdict v;
  v.orth1 = is_orthogonal_pair(f.S1(), f.S2());
  v.orth2 = is_orthogonal_pair(g.S1(), g.S2());
  Subspace z2 = intersect(f.S2(), g.S2());
  v.family_base = z2;
  v.complement_representative = orthogonal_complement(z2);
  if (!f.caps_hold() || !g.caps_hold()) {
    v.status = CoercivityVerdict::Status::Refused;
    v.reason = "capability";
    return v;
  }
  if (!v.orth1 || !v.orth2) {
    v.status = CoercivityVerdict::Status::Refused;
    v.reason = "orthogonality";
    return v;
  }
  v.status = CoercivityVerdict::Status::Certified;
  v.certified_on = v.complement_representative;
  return v;
}

/// x -> phi(Hx) + psi(Kx) is lsc and coercive iff N(H) ∩ N(K) is trivial,
/// given the declared capabilities of phi and psi.
inline bool composite_coercive(const LinearMap& h, const LinearMap& k, const ConvexFn& phi,
                               const ConvexFn& psi) {
  if (h.cols() != k.cols()) throw DimensionMismatch("composite_coercive: H and K domain mismatch");
  if (phi.dim() != h.rows() || psi.dim() != k.rows())
    throw DimensionMismatch("composite_coercive: phi/psi dims must match map ranges");
  for (const ConvexFn* fn : {&phi, &psi}) {
    if (!fn->caps().proper || !fn->caps().lsc || !fn->caps().coercive)
      throw CapabilityMissing("composite_coercive: phi and psi must declare proper, lsc, coercive");
  }
  return intersect(nullspace(h), nullspace(k)).dim() == 0;
}

struct ProbeResult {
  enum class Verdict { Supported, Witness };

  std::vector<double> radii;
  std::vector<double> shell_minima;
  Verdict verdict = Verdict::Supported;
  /// Unit direction of the offending shell minimum (witness case only).
  std::optional<Vector> witness_direction;

  bool supported() const { return verdict == Verdict::Supported; }
};

namespace detail {

/// One parametric escape path r -> point on the sphere of radius r. Ray
/// families follow a fixed unit direction; hyperbolic families pin one
/// coordinate to min(1/r, r/2), matching curve-like escape paths such as
/// (1/n, n) along which a non-coercive sum can still blow down.
struct ShellFamily {
  Vector ray;               // unit direction for ray families
  Eigen::Index pinned = -1;  // hyperbolic: index of the pinned coordinate
  Eigen::Index free = -1;    //             index of the escaping coordinate
  double sign_pinned = 1.0, sign_free = 1.0;

  Vector point(double r, Eigen::Index n) const {
    if (pinned < 0) return r * ray;
    Vector x = Vector::Zero(n);
    double small = std::min(1.0 / r, r / 2.0);
    x(pinned) = sign_pinned * small;
    x(free) = sign_free * std::sqrt(std::max(0.0, r * r - small * small));
    return x;
  }
};

inline std::vector<ShellFamily> shell_families(Eigen::Index n, int samples_per_shell,
                                               std::mt19937_64& rng) {
  std::vector<ShellFamily> fams;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double s : {1.0, -1.0}) {
      ShellFamily f;
      f.ray = Vector::Zero(n);
      f.ray(i) = s;
      fams.push_back(std::move(f));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      for (double si : {1.0, -1.0}) {
        for (double sj : {1.0, -1.0}) {
          ShellFamily f;
          f.ray = Vector::Zero(n);
          f.ray(i) = si / std::sqrt(2.0);
          f.ray(j) = sj / std::sqrt(2.0);
          fams.push_back(std::move(f));
        }
      }
    }
  }
  if (n >= 2) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        for (double si : {1.0, -1.0}) {
          for (double sj : {1.0, -1.0}) {
            ShellFamily f;
            f.pinned = i;
            f.free = j;
            f.sign_pinned = si;
            f.sign_free = sj;
            fams.push_back(std::move(f));
          }
        }
      }
    }
  }
  std::normal_distribution<double> gauss;
  while (static_cast<int>(fams.size()) < samples_per_shell) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = gauss(rng);
    double norm = x.norm();
    if (norm < 1e-12) continue;
    ShellFamily f;
    f.ray = x / norm;
    fams.push_back(std::move(f));
  }
  return fams;
}

}  // namespace detail

/// Heuristic coercivity probe: sample f on spheres of the given radii along
/// deterministic escape families plus seeded random rays, and require the
/// values of every family to strictly increase from the second shell on.
/// A supported verdict is evidence, never a proof. When a restriction
/// subspace is given, sampling stays inside it.
inline ProbeResult coercivity_probe(const ConvexFn& f, const std::vector<double>& radii,
                                    int samples_per_shell, unsigned seed = 0,
                                    const std::optional<Subspace>& restrict_to = std::nullopt) {
  if (radii.size() < 3) throw InvariantViolation("coercivity_probe: need at least 3 shells");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] < radii[i + 1]) || radii[i] <= 0.0)
      throw InvariantViolation("coercivity_probe: radii must be positive and strictly increasing");
  Eigen::Index sample_dim = f.dim();
  if (restrict_to) {
    if (restrict_to->ambient_dim() != f.dim())
      throw DimensionMismatch("coercivity_probe: restriction subspace has wrong ambient dim");
    if (restrict_to->is_trivial())
      throw DimensionMismatch("coercivity_probe: cannot probe the trivial subspace");
    sample_dim = restrict_to->dim();
  }

  ProbeResult out;
  out.radii = radii;
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
  std::vector<detail::ShellFamily> fams =
      detail::shell_families(sample_dim, samples_per_shell, rng);

  const std::size_t ns = radii.size();
  std::vector<std::vector<double>> values(fams.size(), std::vector<double>(ns));
  for (std::size_t s = 0; s < ns; ++s) {
    double best = kInf;
    bool found = false;
    for (std::size_t fi = 0; fi < fams.size(); ++fi) {
      Vector c = fams[fi].point(radii[s], sample_dim);
      Vector x = restrict_to ? restrict_to->from_coords(c) : c;
      double v = f(x);
      values[fi][s] = v;
      if (!found || v < best) {
        best = v;
        found = true;
      }
    }
    out.shell_minima.push_back(best);
  }

  for (std::size_t fi = 0; fi < fams.size(); ++fi) {
    for (std::size_t s = 2; s < ns; ++s) {
      // pairs starting at +inf carry no escape evidence (outside the domain)
      if (std::isfinite(values[fi][s - 1]) && !(values[fi][s] > values[fi][s - 1])) {
        out.verdict = ProbeResult::Verdict::Witness;
        Vector c = fams[fi].point(radii[s], sample_dim);
        Vector x = restrict_to ? restrict_to->from_coords(c) : c;
        out.witness_direction = x.norm() > 0 ? Vector(x / x.norm()) : x;
        return out;
      }
    }
  }
  out.verdict = ProbeResult::Verdict::Supported;
  return out;
}

}  // namespace convexcorr
