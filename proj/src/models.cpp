#include "bmc/error.hpp"
#include "bmc/models.hpp"

namespace bmc {

CoupledSample LevelHierarchy::sample(int level, const SeedSpec& seed) const {
  require(level >= 1, ErrorKind::InvalidArgument, "MLMC levels start at 1");
  CoupledSample s;
  s.level = level;
  if (level == 1) {
    auto v = solve_levels({1}, seed, &s.work_units);
    s.fine = embed(v[0], 1);
    s.coarse = BanachVector::zero(s.fine.space_ptr());
  } else {
    auto v = solve_levels({level, level - 1}, seed, &s.work_units);
    s.fine = embed(v[0], level);
    s.coarse = embed(v[1], level);
  }
  return s;
}

BanachVector LevelHierarchy::embed(const BanachVector& v, int to) const {
  SpacePtr target = space(to);
  if (same_space(v.space(), *target)) return v;
  return prolong(v, target);
}

Sampler constant_sampler(BanachVector x) {
  return [x = std::move(x)](const SeedSpec&) { return x; };
}

Sampler gaussian_sampler(std::size_t n, double p) {
  SpacePtr sp = make_sequence_space(n, p);
  return [sp](const SeedSpec& seed) {
    Stream rng(seed);
    std::vector<double> c(sp->dimension());
    for (double& v : c) v = rng.normal();
    return BanachVector(sp, std::move(c));
  };
}

Sampler uniform_basis_sampler(std::size_t n) {
  SpacePtr sp = make_sequence_space(n, 2.0);
  return [sp](const SeedSpec& seed) {
    Stream rng(seed);
    return uniform_basis_sample(sp, rng);
  };
}

Sampler signed_basis_sampler(std::size_t n) {
  SpacePtr sp = make_sequence_space(n, 1.0);
  return [sp](const SeedSpec& seed) {
    Stream rng(seed);
    std::vector<double> c(sp->dimension(), 0.0);
    double r = rng.rademacher();
    c[rng.index(c.size())] = r;
    return BanachVector(sp, std::move(c));
  };
}

Sampler finite_sampler(std::vector<BanachVector> atoms) {
  require(!atoms.empty(), ErrorKind::InvalidArgument, "finite sampler needs atoms");
  return [atoms = std::move(atoms)](const SeedSpec& seed) {
    Stream rng(seed);
    return atoms[rng.index(atoms.size())];
  };
}

}  // namespace bmc
