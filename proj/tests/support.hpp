#ifndef GMTK_TESTS_SUPPORT_HPP
#define GMTK_TESTS_SUPPORT_HPP

#include <gmtk/oracle.hpp>
#include <gmtk/triplet.hpp>

#include <random>
#include <vector>

namespace gmtk::fixtures {

inline std::vector<GroupModel> shipped_groups() {
  return {GroupModel::so3(), GroupModel::heisenberg3(), GroupModel::abelian(3)};
}

template <class Rng>
TripletPoint random_point(const GroupModel& G, Rng& rng) {
  return {G.random_element(rng), G.random_dual(rng), G.random_alg(rng), G.random_dual(rng)};
}

template <class Rng>
Generator random_generator(const GroupModel& G, Rng& rng) {
  return {G.random_alg(rng), G.random_dual(rng), G.random_alg(rng), G.random_dual(rng)};
}

}  // namespace gmtk::fixtures

#endif
