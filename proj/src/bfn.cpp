// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "vmesh/bfn.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>

namespace vmesh::bfn {

ConflictReport check_conflict_free(const BankAccess& a) {
  ConflictReport r;
  const int n = a.lanes();
  if (static_cast<int>(a.addresses.size()) != n)
    throw std::invalid_argument("BankAccess needs exactly 2^X addresses");
  r.bank_of_lane.assign(static_cast<std::size_t>(n), -1);
  std::vector<std::optional<Index>> owner(static_cast<std::size_t>(n));
  std::vector<bool> flagged(static_cast<std::size_t>(n), false);
  for (int lane = 0; lane < n; ++lane) {
    if (!a.is_active(static_cast<std::size_t>(lane))) continue;
    const int b = a.bank(static_cast<std::size_t>(lane));
    r.bank_of_lane[static_cast<std::size_t>(lane)] = b;
    auto& o = owner[static_cast<std::size_t>(b)];
    if (!o) {
      o = a.addresses[static_cast<std::size_t>(lane)];
    } else if (*o != a.addresses[static_cast<std::size_t>(lane)] && !flagged[static_cast<std::size_t>(b)]) {
      flagged[static_cast<std::size_t>(b)] = true;
      r.conflicting_banks.push_back(b);
    }
  }
  r.conflict_free = r.conflicting_banks.empty();
  return r;
}

BankAccess odd_stride_addresses(Index a0, std::span<const Index> odd_coefs, int bank_bits) {
  if (static_cast<int>(odd_coefs.size()) != bank_bits)
    throw std::invalid_argument("need one coefficient per address bit");
  for (Index o : odd_coefs)
    if (o % 2 == 0) throw std::invalid_argument("odd-stride coefficient must be odd");
  BankAccess a;
  a.bank_bits = bank_bits;
  const int n = 1 << bank_bits;
  a.addresses.resize(static_cast<std::size_t>(n));
  for (int lane = 0; lane < n; ++lane) {
    Index addr = a0;
    for (int i = 0; i < bank_bits; ++i)
      if ((lane >> i) & 1) addr += (Index{1} << i) * odd_coefs[static_cast<std::size_t>(i)];
    a.addresses[static_cast<std::size_t>(lane)] = addr;
  }
  return a;
}

namespace {

struct Packet {
  Index address;
  std::vector<int> lanes;  // destinations still to reach
};

}  // namespace

std::optional<ButterflyRoute> route_butterfly(const BankAccess& a) {
  const int n = a.lanes();
  if (!check_conflict_free(a).conflict_free) return std::nullopt;

  // One packet per distinct address, injected at its bank.
  std::vector<std::optional<Packet>> pos(static_cast<std::size_t>(n));
  {
    std::map<Index, std::vector<int>> by_addr;
    for (int lane = 0; lane < n; ++lane)
      if (a.is_active(static_cast<std::size_t>(lane)))
        by_addr[a.addresses[static_cast<std::size_t>(lane)]].push_back(lane);
    for (auto& [addr, lanes] : by_addr) {
      const auto b = static_cast<std::size_t>(addr & (n - 1));
      pos[b] = Packet{addr, std::move(lanes)};
    }
  }

  ButterflyRoute route;
  route.bank_bits = a.bank_bits;
  for (int s = 0; s < a.bank_bits; ++s) {
    const int bit = 1 << s;
    std::vector<std::optional<Packet>> next(static_cast<std::size_t>(n));
    std::vector<SwitchSetting> stage;
    for (int upper = 0; upper < n; ++upper) {
      if (upper & bit) continue;
      const int lower = upper | bit;
      SwitchSetting sw;
      for (int side = 0; side < 2; ++side) {
        auto& in = pos[static_cast<std::size_t>(side ? lower : upper)];
        if (!in) continue;
        std::vector<int> to_upper, to_lower;
        for (int lane : in->lanes) ((lane & bit) ? to_lower : to_upper).push_back(lane);
        const Source src = side ? Source::Lower : Source::Upper;
        if (!to_upper.empty()) {
          if (next[static_cast<std::size_t>(upper)]) return std::nullopt;
          next[static_cast<std::size_t>(upper)] = Packet{in->address, std::move(to_upper)};
          sw.out_upper = src;
        }
        if (!to_lower.empty()) {
          if (next[static_cast<std::size_t>(lower)]) return std::nullopt;
          next[static_cast<std::size_t>(lower)] = Packet{in->address, std::move(to_lower)};
          sw.out_lower = src;
        }
      }
      stage.push_back(sw);
    }
    route.settings.push_back(std::move(stage));
    pos.swap(next);
  }
  return route;
}

std::vector<Index> simulate_butterfly(const ButterflyRoute& route, std::span<const Index> bank_words) {
  const int n = 1 << route.bank_bits;
  std::vector<std::optional<Index>> v(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) v[static_cast<std::size_t>(p)] = bank_words[static_cast<std::size_t>(p)];
  for (int s = 0; s < route.bank_bits; ++s) {
    const int bit = 1 << s;
    std::vector<std::optional<Index>> next(static_cast<std::size_t>(n));
    std::size_t k = 0;
    for (int upper = 0; upper < n; ++upper) {
      if (upper & bit) continue;
      const int lower = upper | bit;
      const SwitchSetting& sw = route.settings[static_cast<std::size_t>(s)][k++];
      auto pick = [&](Source src) -> std::optional<Index> {
        if (src == Source::Upper) return v[static_cast<std::size_t>(upper)];
        if (src == Source::Lower) return v[static_cast<std::size_t>(lower)];
        return std::nullopt;
      };
      next[static_cast<std::size_t>(upper)] = pick(sw.out_upper);
      next[static_cast<std::size_t>(lower)] = pick(sw.out_lower);
    }
    v.swap(next);
  }
  std::vector<Index> out(static_cast<std::size_t>(n), 0);
  for (int p = 0; p < n; ++p) out[static_cast<std::size_t>(p)] = v[static_cast<std::size_t>(p)].value_or(0);
  return out;
}

Index BankLayout::live_words() const {
  Index n = 1;
  for (Index e : extents) n *= e;
  return n;
}

Index BankLayout::padded_words() const {
  if (extents.empty()) return 1;
  return pitches.front() * extents.front();
}

Index BankLayout::max_row_padding() const {
  Index worst = 0;
  for (std::size_t r = 0; r + 1 < extents.size(); ++r)
    worst = std::max(worst, pitches[r] - pitches[r + 1] * extents[r + 1]);
  return worst;
}

Index BankLayout::address(std::span<const Index> coord) const {
  Index a = 0;
  for (std::size_t r = 0; r < coord.size(); ++r) a += coord[r] * pitches[r];
  return a;
}

AccessFamily AccessFamily::row_fetch(std::size_t rank) {
  AccessFamily f;
  f.pitch_valuation.assign(rank, std::nullopt);
  if (rank > 0) f.pitch_valuation.back() = 0;
  return f;
}

AccessFamily AccessFamily::broadcast(std::size_t rank) {
  AccessFamily f;
  f.pitch_valuation.assign(rank, std::nullopt);
  return f;
}

AccessFamily AccessFamily::strided_window(std::size_t rank, std::size_t dim) {
  AccessFamily f;
  f.pitch_valuation.assign(rank, std::nullopt);
  f.pitch_valuation.at(dim) = 0;
  return f;
}

int valuation(Index n) {
  if (n == 0) return 64;
  int v = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++v;
  }
  return v;
}

Index next_with_valuation(Index n, int v) {
  const Index unit = Index{1} << v;
  // Smallest odd multiple of 2^v that is >= n.
  Index q = (n + unit - 1) / unit;
  if (q % 2 == 0) ++q;
  return q * unit;
}

BankLayout layout_pad_shuffle(std::span<const Index> tile_shape, const AccessFamily& family) {
  if (family.pitch_valuation.size() != tile_shape.size())
    throw InternalError("access family rank does not match the tile");
  BankLayout l;
  l.extents.assign(tile_shape.begin(), tile_shape.end());
  l.pitches.assign(tile_shape.size(), 1);
  Index dense = 1;
  for (std::size_t r = tile_shape.size(); r-- > 0;) {
    const auto& want = family.pitch_valuation[r];
    Index p = dense;
    if (want) {
      if (*want < 0) throw InternalError("negative pitch valuation requested");
      p = next_with_valuation(dense, *want);
    }
    l.pitches[r] = p;
    dense = p * tile_shape[r];
  }
  return l;
}

void BankHeatMap::record(const BankAccess& a) {
  ++cycles_;
  for (std::size_t lane = 0; lane < a.addresses.size(); ++lane)
    if (a.is_active(lane)) ++counts_[static_cast<std::size_t>(a.bank(lane))];
}

void BankHeatMap::write(std::ostream& os) const {
  os << "bank,requests\n";
  for (std::size_t b = 0; b < counts_.size(); ++b) os << b << ',' << counts_[b] << '\n';
  os << "# cycles," << cycles_ << '\n';
}

}  // namespace vmesh::bfn
