#include "modinv/model_spec.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace modinv {
namespace {

std::vector<int> parse_ints(const std::string& text, const std::string& whole) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string piece = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size()) {
      throw std::invalid_argument("bad integer '" + piece + "' in model spec '" + whole + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void expect_count(const ModelSpec& s, std::size_t lo, std::size_t hi, const std::string& text) {
  if (s.params.size() < lo || s.params.size() > hi) {
    throw std::invalid_argument("wrong number of parameters in model spec '" + text + "'");
  }
}

}  // namespace

std::string ModelSpec::to_string() const {
  std::ostringstream os;
  os << family;
  for (std::size_t i = 0; i < params.size(); ++i) os << (i == 0 ? ':' : ',') << params[i];
  return os.str();
}

ModelSpec parse_model_spec(const std::string& text) {
  ModelSpec s;
  const std::size_t colon = text.find(':');
  s.family = text.substr(0, colon);
  if (s.family == "so16l_level1") s.family = "so16l";
  if (colon != std::string::npos) s.params = parse_ints(text.substr(colon + 1), text);
  if (s.family == "su2" || s.family == "so16l") {
    expect_count(s, 1, 1, text);
  } else if (s.family == "sun" || s.family == "zn") {
    expect_count(s, 2, 2, text);
  } else if (s.family == "ising") {
    expect_count(s, 0, 1, text);
    if (!s.params.empty() && s.params[0] == 1) s.params.clear();
  } else {
    throw std::invalid_argument("unknown model family '" + s.family + "' in '" + text + "'");
  }
  return s;
}

ModularData build_model(const ModelSpec& spec) {
  const auto& p = spec.params;
  if (spec.family == "su2") return build_su2(p[0]);
  if (spec.family == "sun") return build_sun(p[0], p[1]);
  if (spec.family == "so16l") return build_so16l_level1(p[0]);
  if (spec.family == "zn") return build_zn_theory(p[0], p[1]);
  if (spec.family == "ising") return build_ising(p.empty() ? 1 : p[0]);
  throw std::invalid_argument("unknown model family '" + spec.family + "'");
}

ModularData build_model(const std::string& text) { return build_model(parse_model_spec(text)); }

std::string model_spec_grammar() {
  return "model spec grammar:\n"
         "  su2:K        SU(2) at level K >= 1\n"
         "  sun:N,K      SU(N) at level K\n"
         "  so16l:L      SO(16L) at level 1 (alias so16l_level1:L)\n"
         "  zn:N,A       Z_N theory with h = A l^2 / 2N, gcd(A,N) = 1, A even for odd N\n"
         "  ising[:NU]   Ising-type theory with h_s = NU/16, NU odd in 1..15\n";
}

}  // namespace modinv
