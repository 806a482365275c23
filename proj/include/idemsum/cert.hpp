#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "idemsum/matrix.hpp"

namespace idemsum {

// FNV-1a digest of dimensions, field and entries; identifies the target a
// certificate was issued for.
inline std::uint64_t mat_digest(const Mat &A) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(A.rows());
  mix(A.cols());
  mix(A.field()->p());
  mix(A.field()->k());
  for (elem v : A.entries()) mix(v);
  return h;
}

// Signed list of idempotent matrices whose signed sum equals a target.
// All-positive signs encode a plain sum of idempotents; mixed signs encode
// an (a_1,...,a_m)-composite with a_i in {1,-1}.
struct DecompCert {
  std::vector<int> signs;   // each +1 or -1
  std::vector<Mat> parts;   // same length as signs
  std::uint64_t target_hash = 0;
  std::uint64_t seed = 0;
  std::string pipeline;

  int count() const { return static_cast<int>(parts.size()); }

  Mat signed_sum(const FieldPtr &F, int n) const {
    Mat s = Mat::zero(F, n, n);
    for (std::size_t i = 0; i < parts.size(); ++i)
      s = (signs[i] > 0) ? s + parts[i] : s - parts[i];
    return s;
  }
};

inline bool verify_cert(const Mat &A, const DecompCert &c) {
  if (c.signs.size() != c.parts.size()) return false;
  for (std::size_t i = 0; i < c.parts.size(); ++i) {
    const Mat &P = c.parts[i];
    if (P.rows() != A.rows() || P.cols() != A.cols()) return false;
    if (*P.field() != *A.field()) return false;
    if (c.signs[i] != 1 && c.signs[i] != -1) return false;
    if (!P.is_idempotent()) return false;
  }
  return c.signed_sum(A.field(), A.rows()) == A;
}

inline DecompCert make_cert(const Mat &target, std::vector<int> signs,
                            std::vector<Mat> parts, const std::string &pipeline,
                            std::uint64_t seed = 0) {
  DecompCert c{std::move(signs), std::move(parts), mat_digest(target), seed, pipeline};
  require(verify_cert(target, c), Errc::GadgetVerificationFailed,
          "constructed certificate failed verification (" + pipeline + ")");
  return c;
}

// Drop zero parts; preserves validity and can only lower the count.
inline DecompCert drop_zero_parts(const Mat &target, const DecompCert &c) {
  DecompCert out;
  out.target_hash = c.target_hash;
  out.seed = c.seed;
  out.pipeline = c.pipeline;
  for (std::size_t i = 0; i < c.parts.size(); ++i) {
    if (c.parts[i].is_zero()) continue;
    out.signs.push_back(c.signs[i]);
    out.parts.push_back(c.parts[i]);
  }
  (void)target;
  return out;
}

// Certificate for the block-diagonal of the inputs' targets. Shorter
// certificates are padded with zero parts; every padded slot takes the sign
// of the longest certificate's pattern, and any explicit sign conflict on a
// shared slot is rejected.
inline DecompCert merge_block_diag(const std::vector<DecompCert> &certs,
                                   const std::vector<Mat> &targets) {
  require(!certs.empty() && certs.size() == targets.size(), Errc::EmptyBlockList,
          "merge requires matching certificate/target lists");
  const FieldPtr &F = targets[0].field();
  std::size_t max_count = 0, longest = 0;
  for (std::size_t i = 0; i < certs.size(); ++i)
    if (certs[i].parts.size() > max_count) {
      max_count = certs[i].parts.size();
      longest = i;
    }
  std::vector<int> pattern(max_count, 1);
  for (std::size_t s = 0; s < max_count; ++s) pattern[s] = certs[longest].signs[s];
  for (const auto &c : certs)
    for (std::size_t s = 0; s < c.signs.size(); ++s)
      require(c.signs[s] == pattern[s] || c.parts[s].is_zero(), Errc::SignPatternConflict,
              "incompatible sign patterns in block-diagonal merge");
  int total = 0;
  for (const auto &t : targets) total += t.rows();
  std::vector<Mat> parts;
  parts.reserve(max_count);
  for (std::size_t s = 0; s < max_count; ++s) {
    Mat part = Mat::zero(F, total, total);
    int off = 0;
    for (std::size_t i = 0; i < certs.size(); ++i) {
      if (s < certs[i].parts.size() && !certs[i].parts[s].is_zero()) {
        // a zero slot is sign-agnostic; nonzero slots match the pattern
        part.set_block(off, off, certs[i].parts[s]);
      }
      off += targets[i].rows();
    }
    parts.push_back(std::move(part));
  }
  Mat target = Mat::zero(F, total, total);
  {
    int off = 0;
    for (const auto &t : targets) {
      target.set_block(off, off, t);
      off += t.rows();
    }
  }
  return make_cert(target, pattern, std::move(parts), "merge");
}

// Expand -Q into (p-1) positive copies of Q; lossy on the part count.
inline DecompCert to_plain_sum(const Mat &target, const DecompCert &c) {
  const std::uint32_t p = target.field()->p();
  DecompCert out;
  out.target_hash = c.target_hash;
  out.seed = c.seed;
  out.pipeline = c.pipeline + "+plain";
  for (std::size_t i = 0; i < c.parts.size(); ++i) {
    std::uint32_t copies = (c.signs[i] > 0) ? 1 : p - 1;
    for (std::uint32_t j = 0; j < copies; ++j) {
      out.signs.push_back(1);
      out.parts.push_back(c.parts[i]);
    }
  }
  require(verify_cert(target, out), Errc::GadgetVerificationFailed, "plain-sum expansion");
  return out;
}

}  // namespace idemsum
