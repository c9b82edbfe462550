// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "vmesh/bfn.hpp"
#include "vmesh/schedule.hpp"

using namespace vmesh;
using namespace vmesh::bfn;

namespace {

BankAccess access_of(int bits, std::vector<Index> addrs) {
  BankAccess a;
  a.bank_bits = bits;
  a.addresses = std::move(addrs);
  return a;
}

// Routes `a` and checks every lane receives the word it asked for.
bool routes_correctly(const BankAccess& a) {
  const auto route = route_butterfly(a);
  if (!route) return false;
  std::vector<Index> bank_words(static_cast<std::size_t>(a.lanes()), -1);
  for (std::size_t lane = 0; lane < a.addresses.size(); ++lane)
    if (a.is_active(lane)) bank_words[static_cast<std::size_t>(a.bank(lane))] = a.addresses[lane];
  const auto got = simulate_butterfly(*route, bank_words);
  for (std::size_t lane = 0; lane < a.addresses.size(); ++lane)
    if (a.is_active(lane) && got[lane] != a.addresses[lane]) return false;
  return true;
}

}  // namespace

TEST_CASE("X=2 odd strides (1,3) hit four banks") {
  const std::vector<Index> o{1, 3};
  const BankAccess a = odd_stride_addresses(0, o, 2);
  CHECK(std::set<Index>(a.addresses.begin(), a.addresses.end()) == std::set<Index>{0, 1, 6, 7});
  const ConflictReport r = check_conflict_free(a);
  CHECK(r.conflict_free);
  CHECK(std::set<int>(r.bank_of_lane.begin(), r.bank_of_lane.end()) == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("identical addresses are a broadcast") {
  const ConflictReport r = check_conflict_free(access_of(5, std::vector<Index>(32, 77)));
  CHECK(r.conflict_free);
  CHECK(routes_correctly(access_of(5, std::vector<Index>(32, 77))));
}

TEST_CASE("congruent addresses conflict") {
  const ConflictReport r = check_conflict_free(access_of(2, {0, 4, 8, 12}));
  CHECK_FALSE(r.conflict_free);
  CHECK(r.conflicting_banks == std::vector<int>{0});
  CHECK_FALSE(route_butterfly(access_of(2, {0, 4, 8, 12})));
}

TEST_CASE("unit stride rotates the banks") {
  const std::vector<Index> ones(5, 1);
  for (Index a0 : {Index{0}, Index{5}, Index{31}, Index{1000}}) {
    const BankAccess a = odd_stride_addresses(a0, ones, 5);
    for (int lane = 0; lane < 32; ++lane) CHECK(a.addresses[static_cast<std::size_t>(lane)] == a0 + lane);
    const ConflictReport r = check_conflict_free(a);
    REQUIRE(r.conflict_free);
    for (int lane = 0; lane < 32; ++lane) CHECK(r.bank_of_lane[static_cast<std::size_t>(lane)] == (a0 + lane) % 32);
  }
}

TEST_CASE("o=(3,1,1,1,1), A0=7 gives distinct banks") {
  const std::vector<Index> o{3, 1, 1, 1, 1};
  const BankAccess a = odd_stride_addresses(7, o, 5);
  std::set<Index> banks;
  for (Index x : a.addresses) banks.insert(x % 32);
  CHECK(banks.size() == 32);
  CHECK(check_conflict_free(a).conflict_free);
  CHECK(routes_correctly(a));
}

TEST_CASE("even coefficient is a precondition violation") {
  const std::vector<Index> o{1, 2, 1};
  CHECK_THROWS(odd_stride_addresses(0, o, 3));
}

TEST_CASE("property: random odd strides are conflict-free and routable") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<Index> half(0, 500), base(0, 1 << 20);
  for (int t = 0; t < 1000; ++t) {
    std::vector<Index> o(5);
    for (auto& x : o) x = 2 * half(rng) + 1;
    const BankAccess a = odd_stride_addresses(base(rng), o, 5);
    REQUIRE(check_conflict_free(a).conflict_free);
    REQUIRE(routes_correctly(a));
  }
}

TEST_CASE("exhaustive small X") {
  for (int x = 1; x <= 3; ++x) {
    const Index m = Index{1} << x;
    std::vector<Index> o(static_cast<std::size_t>(x), 1);
    // Odd residues mod 2^X are all that matter for the bank pattern.
    while (true) {
      for (Index a0 = 0; a0 < m; ++a0) REQUIRE(check_conflict_free(odd_stride_addresses(a0, o, x)).conflict_free);
      std::size_t d = 0;
      while (d < o.size() && (o[d] += 2) >= m) o[d++] = 1;
      if (d == o.size()) break;
    }
  }
}

TEST_CASE("masked lanes are ignored") {
  BankAccess a = access_of(2, {0, 4, 1, 2});
  a.active = {true, false, true, true};
  CHECK(check_conflict_free(a).conflict_free);
  const std::vector<Index> o{1, 3};
  BankAccess b = odd_stride_addresses(0, o, 2);
  b.addresses[1] = 8;
  b.active = {true, false, true, true};
  CHECK(check_conflict_free(b).conflict_free);
  CHECK(routes_correctly(b));
}

TEST_CASE("a conflict-free permutation outside the odd-stride class can block") {
  // Banks 0 and 1 both want the upper output of the first stage.
  BankAccess a = access_of(2, {0, 4, 1, 2});
  a.active = {true, false, true, true};
  CHECK(check_conflict_free(a).conflict_free);
  CHECK_FALSE(route_butterfly(a));
}

TEST_CASE("row fetch needs no padding") {
  const std::vector<Index> shape{16, 32};
  const BankLayout l = layout_pad_shuffle(shape, AccessFamily::row_fetch(2));
  CHECK(l.padding_words() == 0);
  CHECK(l.pitches == std::vector<Index>{32, 1});
}

TEST_CASE("even row pitch is padded by one word") {
  const std::vector<Index> shape{2, 32, 8};
  const BankLayout l = layout_pad_shuffle(shape, AccessFamily::strided_window(3, 1));
  CHECK(l.pitches[1] == 9);
  CHECK(l.max_row_padding() <= 1);
  // Every window origin inside the tile: 32 lanes walk dim 1.
  for (Index c = 0; c < 2; ++c)
    for (Index y = 0; y < 8; ++y) {
      std::vector<Index> addrs;
      for (Index j = 0; j < 32; ++j) {
        const std::vector<Index> coord{c, j, y};
        addrs.push_back(l.address(coord));
      }
      REQUIRE(check_conflict_free(access_of(5, addrs)).conflict_free);
    }
  // Without padding the same pattern collides.
  std::vector<Index> dense;
  for (Index j = 0; j < 32; ++j) dense.push_back(8 * j);
  CHECK_FALSE(check_conflict_free(access_of(5, dense)).conflict_free);
}

TEST_CASE("layout is injective") {
  const std::vector<Index> shape{3, 5, 6};
  const BankLayout l = layout_pad_shuffle(shape, AccessFamily::strided_window(3, 1));
  std::set<Index> seen;
  for (Index a = 0; a < 3; ++a)
    for (Index b = 0; b < 5; ++b)
      for (Index c = 0; c < 6; ++c) {
        const std::vector<Index> coord{a, b, c};
        CHECK(seen.insert(l.address(coord)).second);
      }
  CHECK(l.live_words() == 90);
}

TEST_CASE("correlation windows are conflict-free at random positions") {
  const Workload w = make_correlation(16, 24, 24, 9, 9);
  std::optional<TEUProgram> prog;
  for (const auto& f : all_factorizations(w.parallel_count, kBankBits)) {
    if (!access_family(w.inputs[0], f) || !access_family(w.inputs[1], f)) continue;
    prog = lower_to_teu(w, make_scheme(w, {4, 4, 8, 8, 4}), f);
    break;
  }
  REQUIRE(prog);
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<Index> cyc(0, prog->cycles() - 1), shift(0, 4096);
  for (int t = 0; t < 10000; ++t) {
    BankAccess a = prog->access(1, cyc(rng));
    const Index s = shift(rng);
    for (auto& x : a.addresses) x += s;
    REQUIRE(check_conflict_free(a).conflict_free);
  }
}

TEST_CASE("valuation helpers") {
  CHECK(valuation(12) == 2);
  CHECK(valuation(7) == 0);
  CHECK(next_with_valuation(8, 0) == 9);
  CHECK(next_with_valuation(9, 0) == 9);
  CHECK(next_with_valuation(8, 1) == 10);
  CHECK(valuation(next_with_valuation(100, 3)) == 3);
}

TEST_CASE("heat map counts bank hits") {
  BankHeatMap h(2);
  h.record(access_of(2, {0, 1, 2, 3}));
  h.record(access_of(2, {4, 5, 6, 7}));
  CHECK(h.counts() == std::vector<std::uint64_t>{2, 2, 2, 2});
  std::ostringstream os;
  h.write(os);
  CHECK_FALSE(os.str().empty());
}
