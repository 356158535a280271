#include "modinv/modular_data.hpp"

#include <algorithm>
#include <sstream>

namespace modinv {

FusionRing::FusionRing(std::vector<IntMatrix> matrices) : n_(std::move(matrices)) {
  const int r = rank();
  conj_.assign(r, -1);
  for (int l = 0; l < r; ++l) {
    if (n_[l].rows() != r || n_[l].cols() != r) {
      throw std::invalid_argument("fusion matrices must be rank x rank");
    }
    for (int m = 0; m < r; ++m) {
      if (n_[l](m, 0) == 1) {
        conj_[l] = m;
        break;
      }
    }
  }
}

bool operator==(const FusionRing& a, const FusionRing& b) {
  if (a.rank() != b.rank()) return false;
  for (int l = 0; l < a.rank(); ++l) {
    if (a.n_[l] != b.n_[l]) return false;
  }
  return true;
}

std::vector<std::string> fusion_ring_violations(const FusionRing& fr) {
  std::vector<std::string> out;
  const int r = fr.rank();
  if (r == 0) {
    out.emplace_back("empty ring");
    return out;
  }
  auto report = [&](const std::string& what, int l, int m, int n) {
    std::ostringstream os;
    os << what << " at (" << l << "," << m << "," << n << ")";
    out.push_back(os.str());
  };
  for (int l = 0; l < r; ++l) {
    if ((fr.matrix(l).array() < 0).any()) report("negative coefficient", l, -1, -1);
  }
  if (fr.matrix(0) != IntMatrix::Identity(r, r)) report("vacuum is not a unit", 0, -1, -1);
  const auto& conj = fr.conj();
  for (int l = 0; l < r; ++l) {
    const int c = conj[l];
    if (c < 0 || conj[c] != l) {
      report("conjugation is not an involution", l, -1, -1);
      continue;
    }
    for (int m = 0; m < r; ++m) {
      if (fr(l, m, 0) != (m == c ? 1 : 0)) report("N_{l,m}^0 differs from conjugation", l, m, 0);
    }
    if (fr.matrix(c) != fr.matrix(l).transpose()) report("N_conj(l) is not the transpose", l, c, -1);
  }
  if (!out.empty()) return out;
  if (conj[0] != 0) report("vacuum is not self-conjugate", 0, -1, -1);
  // Associativity in matrix form: N_m N_l = sum_s N_{l,m}^s N_s.
  for (int l = 0; l < r; ++l) {
    for (int m = l; m < r; ++m) {
      if (fr(l, m, 0) != fr(m, l, 0)) report("noncommutative", l, m, -1);
      const IntMatrix lhs = fr.matrix(m) * fr.matrix(l);
      IntMatrix rhs = IntMatrix::Zero(r, r);
      for (int s = 0; s < r; ++s) {
        if (fr(l, m, s) != 0) rhs += fr(l, m, s) * fr.matrix(s);
      }
      if (lhs != rhs) report("associativity fails", l, m, -1);
    }
  }
  return out;
}

FusionRing fusion_subring(const FusionRing& fr, const std::vector<int>& labels) {
  if (labels.empty() || labels.front() != 0) {
    throw std::invalid_argument("sub-ring labels must start with the vacuum");
  }
  std::vector<int> position(fr.rank(), -1);
  for (std::size_t i = 0; i < labels.size(); ++i) position[labels[i]] = static_cast<int>(i);
  const int r = static_cast<int>(labels.size());
  std::vector<IntMatrix> mats(r, IntMatrix::Zero(r, r));
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      for (int c = 0; c < fr.rank(); ++c) {
        const auto v = fr(labels[a], labels[b], c);
        if (v == 0) continue;
        if (position[c] < 0) throw std::invalid_argument("label set is not closed under fusion");
        mats[a](b, position[c]) = v;
      }
    }
  }
  return FusionRing(std::move(mats));
}

}  // namespace modinv
