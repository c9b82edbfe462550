// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "vmesh/catalog.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

namespace vmesh {

namespace {

CatalogEntry conv(std::string name, std::string group, Index stride, Index kw, Index kh,
                  Index ci, Index co, Index spatial, Index dilation = 1) {
  CatalogEntry e;
  e.name = std::move(name);
  e.kind = WorkloadKind::Conv;
  e.group = std::move(group);
  e.stride = stride;
  e.k_w = kw;
  e.k_h = kh;
  e.c_in = ci;
  e.c_out = co;
  e.spatial = spatial;
  e.dilation = dilation;
  return e;
}

}  // namespace

Workload CatalogEntry::build() const {
  Workload w;
  switch (kind) {
    case WorkloadKind::Gemm: w = make_gemm(gemm_m, gemm_n, gemm_k); break;
    case WorkloadKind::Conv:
      w = make_conv(c_in, c_out, spatial, spatial, k_w, k_h, stride, dilation);
      break;
    case WorkloadKind::Depthwise:
      w = make_depthwise(c_out, spatial, spatial, k_w, k_h, stride, dilation);
      break;
    case WorkloadKind::Correlation:
      w = make_correlation(c_in, spatial, spatial, k_w, k_h);
      break;
  }
  w.name = name;
  return w;
}

std::vector<CatalogEntry> classic_suite(Index s) {
  return {
      conv("AL CONV1", "classic", 4, 11, 11, 3, 48, s),
      conv("AL CONV2", "classic", 1, 5, 5, 48, 128, s),
      conv("AL CONV3", "classic", 1, 3, 3, 128, 192, s),
      conv("AL CONV4", "classic", 1, 3, 3, 192, 192, s),
      conv("AL CONV5", "classic", 1, 3, 3, 192, 128, s),
      conv("TY CONV1", "classic", 1, 3, 3, 3, 16, s),
      conv("TY CONV2", "classic", 1, 3, 3, 16, 32, s),
      conv("TY CONV3", "classic", 1, 3, 3, 32, 64, s),
      conv("TY CONV4", "classic", 1, 3, 3, 64, 128, s),
      conv("TY CONV5", "classic", 1, 3, 3, 128, 256, s),
      conv("TY CONV6", "classic", 1, 3, 3, 256, 512, s),
      conv("TY CONV8", "classic", 1, 1, 1, 1024, 125, s),
      conv("IN 1x7", "classic", 1, 1, 7, 64, 64, s),
      conv("IN 7x1", "classic", 1, 7, 1, 64, 64, s),
      conv("SR CONV1", "classic", 1, 9, 9, 3, 64, s),
  };
}

std::vector<CatalogEntry> catalog_entries(Index s) {
  auto all = classic_suite(s);
  all.push_back(conv("DL ASPP D2", "modern", 1, 3, 3, 128, 128, s, 2));
  all.push_back(conv("DL ASPP D4", "modern", 1, 3, 3, 64, 64, s, 4));
  all.push_back(conv("ES CONV2", "modern", 1, 3, 3, 64, 32, s));
  all.push_back(conv("ES CONV3", "modern", 1, 3, 3, 32, 9, s));
  {
    CatalogEntry e = conv("MB DW3x3", "modern", 1, 3, 3, 1, 128, s);
    e.kind = WorkloadKind::Depthwise;
    all.push_back(e);
  }
  all.push_back(conv("MB PW1x1", "modern", 1, 1, 1, 128, 128, s));
  {
    // Displacement window in k_w x k_h, output map of spatial/2 pixels.
    CatalogEntry e = conv("FN CORR", "matching", 1, 9, 9, 32, 1, s / 2);
    e.kind = WorkloadKind::Correlation;
    all.push_back(e);
    CatalogEntry v = conv("EV CORR", "matching", 1, 5, 5, 16, 1, s);
    v.kind = WorkloadKind::Correlation;
    all.push_back(v);
  }
  for (Index n : {Index{128}, Index{256}}) {
    CatalogEntry g;
    g.name = "MM " + std::to_string(n);
    g.kind = WorkloadKind::Gemm;
    g.group = "gemm";
    g.gemm_m = g.gemm_n = g.gemm_k = n;
    all.push_back(g);
  }
  return all;
}

std::vector<Workload> catalog(Index spatial) {
  std::vector<Workload> out;
  for (const auto& e : catalog_entries(spatial)) out.push_back(e.build());
  return out;
}

std::optional<CatalogEntry> find_entry(const std::string& name, Index spatial) {
  for (auto& e : catalog_entries(spatial))
    if (e.name == name) return e;
  return std::nullopt;
}

void write_catalog(std::ostream& os, const std::vector<CatalogEntry>& entries) {
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["name"] = e.name;
    j["type"] = to_string(e.kind);
    j["group"] = e.group;
    j["stride"] = e.stride;
    j["kernel"] = {e.k_w, e.k_h};
    j["channels"] = {e.c_in, e.c_out};
    j["spatial"] = e.spatial;
    j["dilation"] = e.dilation;
    if (e.kind == WorkloadKind::Gemm) j["gemm"] = {e.gemm_m, e.gemm_n, e.gemm_k};
    os << j.dump() << '\n';
  }
}

std::vector<CatalogEntry> read_catalog(std::istream& is) {
  std::vector<CatalogEntry> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    CatalogEntry e;
    e.name = j.at("name").get<std::string>();
    e.kind = workload_kind_from_string(j.at("type").get<std::string>());
    e.group = j.value("group", std::string{});
    e.stride = j.at("stride").get<Index>();
    e.k_w = j.at("kernel").at(0).get<Index>();
    e.k_h = j.at("kernel").at(1).get<Index>();
    e.c_in = j.at("channels").at(0).get<Index>();
    e.c_out = j.at("channels").at(1).get<Index>();
    e.spatial = j.at("spatial").get<Index>();
    e.dilation = j.value("dilation", Index{1});
    if (j.contains("gemm")) {
      e.gemm_m = j["gemm"].at(0).get<Index>();
      e.gemm_n = j["gemm"].at(1).get<Index>();
      e.gemm_k = j["gemm"].at(2).get<Index>();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace vmesh
