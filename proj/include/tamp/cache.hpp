#pragma once

// Binary basis-graph cache. Little-endian layout:
//
//   magic "TAMPEBRG" | u32 format_version | 32-byte SHA-256 of the monitored net
//   u32 transitions | u32 n_explicit | u32 ids... | u32 n_implicit | u32 ids...
//   u32 width | u64 n_markings
//   per marking: u32 nnz | (u32 place, u32 count)*
//   per marking: i64 q_num | i64 q_den
//   per non-root marking: u32 parent | u32 transition | u32 nnz | (u32 t, u32 count)*
//   magic "END."

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "tamp/ebrg.hpp"
#include "tamp/error.hpp"
#include "tamp/petri_net.hpp"

namespace tamp {

inline constexpr std::uint32_t kCacheFormatVersion = 1;
using Digest = std::array<std::uint8_t, 32>;

namespace detail {

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void bytes(std::string_view b) { out_.append(b); }
  void cost(const Cost& c) {
    i64(c.numerator());
    i64(c.denominator());
  }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view in) : in_(in) {}

  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw CacheError(CacheError::Kind::kFormat, "cache file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto v = in_.substr(pos_, n);
    pos_ += n;
    return v;
  }
  Cost cost() {
    std::int64_t num = i64();
    std::int64_t den = i64();
    if (den <= 0) throw CacheError(CacheError::Kind::kFormat, "bad cost denominator in cache");
    return Cost(num, den);
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

inline Digest sha256(std::string_view data) {
  Digest d{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, d.data(), &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("SHA-256 computation failed");
  }
  EVP_MD_CTX_free(ctx);
  return d;
}

}  // namespace detail

// Content digest over everything that affects basis-graph construction.
inline Digest net_digest(const PetriNet& net) {
  detail::ByteWriter w;
  w.bytes("tamp-net");
  w.u32(static_cast<std::uint32_t>(net.place_count()));
  for (PlaceId p = 0; p < net.place_count(); ++p) {
    w.u32(net.initial_marking()[p]);
    auto cap = net.capacity(p);
    w.u32(cap ? *cap + 1 : 0);
    w.u32(static_cast<std::uint32_t>(net.labels(p).size()));
    for (const Atom& a : net.labels(p)) {
      w.u32(static_cast<std::uint32_t>(a.kind));
      w.u32(static_cast<std::uint32_t>(a.name.size()));
      w.bytes(a.name);
    }
  }
  w.u32(static_cast<std::uint32_t>(net.transition_count()));
  for (TransitionId t = 0; t < net.transition_count(); ++t) {
    w.cost(net.cost(t));
    for (auto arcs : {net.inputs(t), net.outputs(t)}) {
      w.u32(static_cast<std::uint32_t>(arcs.size()));
      for (PlaceId p : arcs) w.u32(p);
    }
  }
  return detail::sha256(w.str());
}

inline std::string serialize_cache(const BasisGraph& g, const BasisPartition& part, const PetriNet& net) {
  detail::ByteWriter w;
  w.bytes("TAMPEBRG");
  w.u32(kCacheFormatVersion);
  Digest d = net_digest(net);
  w.bytes(std::string_view(reinterpret_cast<const char*>(d.data()), d.size()));
  w.u32(static_cast<std::uint32_t>(part.is_explicit.size()));
  for (const auto* ids : {&part.explicit_transitions, &part.implicit_transitions}) {
    w.u32(static_cast<std::uint32_t>(ids->size()));
    for (TransitionId t : *ids) w.u32(t);
  }
  w.u32(static_cast<std::uint32_t>(g.width()));
  w.u64(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto c = g.counts(i);
    std::uint32_t nnz = 0;
    for (Count x : c) nnz += x > 0;
    w.u32(nnz);
    for (std::size_t p = 0; p < c.size(); ++p)
      if (c[p] > 0) {
        w.u32(static_cast<std::uint32_t>(p));
        w.u32(c[p]);
      }
  }
  for (std::size_t i = 0; i < g.size(); ++i) w.cost(g.cost(i));
  for (std::size_t i = 1; i < g.size(); ++i) {
    const BasisEdge& e = g.edge(i);
    w.u32(e.parent);
    w.u32(e.transition);
    w.u32(static_cast<std::uint32_t>(e.explanation.entries().size()));
    for (const auto& [t, n] : e.explanation.entries()) {
      w.u32(t);
      w.u32(n);
    }
  }
  w.bytes("END.");
  return std::move(w.str());
}

struct LoadedCache {
  BasisGraph graph;
  BasisPartition partition;
};

inline LoadedCache deserialize_cache(std::string_view bytes, const PetriNet& net) {
  using K = CacheError::Kind;
  detail::ByteReader r(bytes);
  if (bytes.size() < 8 || r.bytes(8) != "TAMPEBRG") throw CacheError(K::kFormat, "not a basis-graph cache file");
  std::uint32_t version = r.u32();
  if (version != kCacheFormatVersion)
    throw CacheError(K::kVersion, "cache format version " + std::to_string(version) + ", expected " +
                                      std::to_string(kCacheFormatVersion));
  Digest stored{};
  auto db = r.bytes(stored.size());
  std::memcpy(stored.data(), db.data(), stored.size());
  if (stored != net_digest(net)) throw CacheError(K::kDigest, "cache was built for a different environment");

  const std::uint32_t nt = r.u32();
  if (nt != net.transition_count()) throw CacheError(K::kFormat, "partition size mismatch");
  std::vector<bool> is_explicit(nt, false);
  std::uint32_t n_exp = r.u32();
  if (n_exp > nt) throw CacheError(K::kFormat, "bad partition");
  for (std::uint32_t i = 0; i < n_exp; ++i) {
    std::uint32_t t = r.u32();
    if (t >= nt) throw CacheError(K::kFormat, "bad partition id");
    is_explicit[t] = true;
  }
  std::uint32_t n_imp = r.u32();
  for (std::uint32_t i = 0; i < n_imp; ++i)
    if (r.u32() >= nt) throw CacheError(K::kFormat, "bad partition id");
  if (n_exp + n_imp != nt) throw CacheError(K::kFormat, "partition does not cover all transitions");
  LoadedCache out;
  try {
    out.partition = make_partition(net, std::move(is_explicit));
  } catch (const DomainError& e) {
    throw CacheError(K::kFormat, e.what());
  }

  const std::uint32_t width = r.u32();
  if (width != net.place_count()) throw CacheError(K::kFormat, "marking width mismatch");
  const std::uint64_t n = r.u64();
  if (n == 0) throw CacheError(K::kFormat, "empty basis graph");
  std::vector<std::vector<Count>> rows(n, std::vector<Count>(width, 0));
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint32_t nnz = r.u32();
    if (nnz > width) throw CacheError(K::kFormat, "bad sparse marking");
    for (std::uint32_t k = 0; k < nnz; ++k) {
      std::uint32_t p = r.u32();
      std::uint32_t c = r.u32();
      if (p >= width) throw CacheError(K::kFormat, "bad place id in marking");
      rows[i][p] = c;
    }
  }
  std::vector<Cost> costs(n);
  for (auto& c : costs) c = r.cost();
  out.graph = BasisGraph(width);
  out.graph.append(rows[0], costs[0], BasisEdge{});
  for (std::uint64_t i = 1; i < n; ++i) {
    BasisEdge e;
    e.parent = r.u32();
    e.transition = r.u32();
    if (e.parent >= n || e.transition >= nt) throw CacheError(K::kFormat, "bad edge");
    std::uint32_t nnz = r.u32();
    std::vector<FiringVector::Entry> entries;
    for (std::uint32_t k = 0; k < nnz; ++k) {
      std::uint32_t t = r.u32();
      std::uint32_t c = r.u32();
      if (t >= nt) throw CacheError(K::kFormat, "bad explanation id");
      entries.push_back({t, c});
    }
    e.explanation = FiringVector(std::move(entries));
    out.graph.append(rows[i], costs[i], std::move(e));
  }
  if (r.bytes(4) != "END.") throw CacheError(K::kFormat, "missing end marker");
  if (!r.done()) throw CacheError(K::kFormat, "trailing bytes after end marker");
  return out;
}

inline void save_cache(const BasisGraph& g, const BasisPartition& part, const PetriNet& net,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CacheError(CacheError::Kind::kIo, "cannot write cache file " + path.string());
  const std::string bytes = serialize_cache(g, part, net);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CacheError(CacheError::Kind::kIo, "write failed for " + path.string());
}

inline LoadedCache load_cache(const std::filesystem::path& path, const PetriNet& net) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError(CacheError::Kind::kIo, "cannot open cache file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize_cache(ss.str(), net);
}

}  // namespace tamp
