#include "modinv/cli.hpp"

#include "modinv/extensions.hpp"
#include "modinv/fusion_verlinde.hpp"
#include "modinv/graphs_nimreps.hpp"
#include "modinv/invariant_engine.hpp"
#include "modinv/model_spec.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <sstream>

namespace modinv {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

json matrix_json(const IntMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

IntMatrix matrix_from_json(const json& j, int rank) {
  if (!j.is_array() || static_cast<int>(j.size()) != rank) {
    throw InvalidInput("invariant matrix must have " + std::to_string(rank) + " rows");
  }
  IntMatrix m(rank, rank);
  for (int i = 0; i < rank; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != rank) {
      throw InvalidInput("invariant row " + std::to_string(i) + " must have " + std::to_string(rank) + " entries");
    }
    for (int k = 0; k < rank; ++k) m(i, k) = j[i][k].get<std::int64_t>();
  }
  return m;
}

// Rounds away float noise so that -0 and 1e-17 print as 0.
double clean(double x) { return std::abs(x) < 1e-14 ? 0.0 : x; }

std::string fixed(double x, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << clean(x);
  return os.str();
}

std::string complex_text(std::complex<double> z) {
  if (std::abs(z.imag()) < 1e-12) return fixed(z.real());
  if (std::abs(z.real()) < 1e-12) return fixed(z.imag()) + "i";
  return fixed(z.real()) + (z.imag() < 0 ? "-" : "+") + fixed(std::abs(z.imag())) + "i";
}

std::string int_table(const IntMatrix& m) {
  std::size_t width = 1;
  for (Eigen::Index i = 0; i < m.size(); ++i) width = std::max(width, std::to_string(m.data()[i]).size());
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "  ") << std::setw(static_cast<int>(width)) << m(i, j);
    os << "\n";
  }
  return os.str();
}

std::vector<Rational> twists(const ModularData& md) {
  std::vector<Rational> h;
  for (const auto& l : md.labels) h.push_back(l.h);
  return h;
}

json document(const std::string& command, const json& model, const RunOptions& opt, json result) {
  json manifest;
  manifest["command"] = command;
  manifest["model"] = model;
  manifest["tolerance"] = opt.tolerance;
  manifest["max_nodes"] = opt.max_nodes;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["schema_version"] = kSchemaVersion;
  manifest["output_digest"] = fnv1a_hex(result.dump());
  return json{{"manifest", manifest}, {"result", std::move(result)}};
}

void require_format(const RunOptions& opt, std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* f : allowed) {
    if (opt.format == f) return;
    list += list.empty() ? f : std::string(", ") + f;
  }
  throw InvalidInput("format '" + opt.format + "' is not available here; use one of " + list);
}

CommandResult finish(json doc, const RunOptions& opt, const std::function<std::string()>& text) {
  CommandResult out;
  out.output = opt.format == "json" ? doc.dump(2) + "\n" : text();
  out.document = std::move(doc);
  return out;
}

CommandResult guarded(const std::function<CommandResult()>& body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    return {kExitInvalid, "", e.what(), nullptr};
  } catch (const std::out_of_range& e) {
    return {kExitInvalid, "", e.what(), nullptr};
  } catch (const json::exception& e) {
    return {kExitInvalid, "", std::string("malformed JSON input: ") + e.what(), nullptr};
  } catch (const ResourceLimit& e) {
    return {kExitTruncated, "", e.what(), nullptr};
  }
}

json indices_json(const GlobalIndices& g) {
  return {{"w", g.w}, {"w_plus", g.w_plus}, {"w_minus", g.w_minus}, {"w_alpha", g.w_alpha}, {"w_zero", g.w_zero}};
}

json classification_json(const ModularData& md, const IntMatrix& z, const RunOptions& opt) {
  const Classification c = classify(md, z);
  json j;
  j["matrix"] = matrix_json(z);
  j["trace"] = c.trace;
  j["type"] = c.type();
  j["permutation"] = c.is_permutation;
  j["heterotic"] = c.is_heterotic;
  j["symmetric"] = c.is_symmetric;
  j["exceptional"] = c.exceptional;
  j["blocks"] = nullptr;
  if (c.type1_fit) {
    json blocks = json::array();
    for (Eigen::Index t = 0; t < c.type1_fit->b.rows(); ++t) {
      json block = json::array();
      for (int l = 0; l < md.rank(); ++l) {
        if (c.type1_fit->b(t, l)) block.push_back(json::array({md.labels[l].descriptor, c.type1_fit->b(t, l)}));
      }
      blocks.push_back(block);
    }
    j["blocks"] = blocks;
  }
  j["global_indices"] = indices_json(chiral_global_indices(md, z, opt.tolerance));
  return j;
}

std::string classification_text(const json& inv) {
  std::ostringstream os;
  os << "type " << inv["type"].get<std::string>() << ", trace " << inv["trace"].get<std::int64_t>();
  if (inv["permutation"].get<bool>()) os << ", permutation";
  if (inv["exceptional"].get<bool>()) os << ", exceptional";
  const json& g = inv["global_indices"];
  os << ", w+ " << fixed(g["w_plus"].get<double>()) << ", w- " << fixed(g["w_minus"].get<double>()) << "\n";
  if (!inv["blocks"].is_null()) {
    os << "  blocks:";
    for (const auto& block : inv["blocks"]) {
      os << " {";
      bool first = true;
      for (const auto& e : block) {
        os << (first ? "" : ",") << e[0].get<std::string>();
        if (e[1].get<std::int64_t>() > 1) os << "x" << e[1].get<std::int64_t>();
        first = false;
      }
      os << "}";
    }
    os << "\n";
  }
  IntMatrix z(inv["matrix"].size(), inv["matrix"].size());
  for (std::size_t i = 0; i < inv["matrix"].size(); ++i) {
    for (std::size_t k = 0; k < inv["matrix"].size(); ++k) z(i, k) = inv["matrix"][i][k].get<std::int64_t>();
  }
  return os.str() + int_table(z);
}

int label_of(const ModularData& md, const std::string& descriptor) {
  const int l = md.find(descriptor);
  if (l < 0) throw InvalidInput("model " + md.model + " has no label '" + descriptor + "'");
  return l;
}

std::string ade_name(const FusionGraph& g) {
  if (g.oriented() || g.size() == 0) return "";
  for (const auto& [name, d] : ade_library(g.size())) {
    if (d.adjacency.rows() == g.size() && graphs_isomorphic(g, FusionGraph{d.adjacency, {}, {}, 0, {}}, false)) return name;
  }
  return "";
}

}  // namespace

std::vector<std::string> embedding_names() {
  std::vector<std::string> out;
  for (const auto& [name, f] : builtin_fixtures().embeddings) out.push_back(name);
  return out;
}

CommandResult cmd_data(const std::string& model, const RunOptions& opt) {
  return guarded([&] {
    require_format(opt, {"json", "table"});
    const ModularData md = build_model(model);
    const int r = md.rank();
    json res;
    res["model"] = md.model;
    res["rank"] = r;
    res["exact"] = md.exact();
    res["central_charge"] = to_string(md.central_charge);
    res["c_residue"] = to_string(md.c_residue());
    json labels = json::array();
    for (const auto& l : md.labels) {
      json e{{"index", l.index}, {"descriptor", l.descriptor}, {"h", to_string(l.h)}, {"weight", to_string(l.weight)},
             {"conj", l.conj}, {"dimension", md.d[l.index]}};
      e["grade"] = md.grading ? json(md.grading->grade[l.index]) : json(nullptr);
      labels.push_back(e);
    }
    res["labels"] = labels;
    res["grade_modulus"] = md.grading ? json(md.grading->modulus) : json(nullptr);
    json re = json::array(), im = json::array();
    for (int i = 0; i < r; ++i) {
      json a = json::array(), b = json::array();
      for (int k = 0; k < r; ++k) {
        a.push_back(clean(md.s(i, k).real()));
        b.push_back(clean(md.s(i, k).imag()));
      }
      re.push_back(a);
      im.push_back(b);
    }
    res["s"] = {{"re", re}, {"im", im}};
    json t = json::array();
    for (int l = 0; l < r; ++l) t.push_back(to_string(md.t_exponent(l)));
    res["t_exponents"] = t;
    json fusion = json::array();
    for (int l = 0; l < r; ++l) fusion.push_back(matrix_json(md.fusion.matrix(l)));
    res["fusion"] = fusion;
    res["global_index"] = md.w;
    const std::vector<Rational> h = twists(md);
    try {
      const GaussSum g = gauss_sum(md.fusion, h, opt.tolerance);
      res["gauss_sum"] = {{"re", clean(g.z.real())},
                          {"im", clean(g.z.imag())},
                          {"w", g.w},
                          {"nondegenerate", g.nondegenerate},
                          {"c_residue", g.c_residue ? json(to_string(*g.c_residue)) : json(nullptr)}};
    } catch (const DegenerateData&) {
      res["gauss_sum"] = nullptr;
    }
    res["degenerate_labels"] = degenerate_labels(md.fusion, h, opt.tolerance);
    const AxiomReport ax = verify_modular_axioms(md);
    json checks = json::array();
    for (const auto& c : ax.checks) checks.push_back({{"relation", c.relation}, {"passed", c.passed}, {"residual", c.residual}});
    res["axioms"] = {{"partial", ax.partial_ok()}, {"full", ax.full_ok()}, {"checks", checks}};
    CommandResult out = finish(document("data", md.model, opt, res), opt, [&] {
      std::ostringstream os;
      os << "model " << md.model << ", rank " << r << ", c = " << to_string(md.central_charge) << ", w = " << fixed(md.w)
         << (md.exact() ? ", exact" : ", floating") << "\n";
      os << "labels (index, descriptor, h, d, conj)\n";
      for (const auto& l : md.labels) {
        os << "  " << l.index << "  " << l.descriptor << "  " << to_string(l.h) << "  " << fixed(md.d[l.index]) << "  "
           << l.conj << "\n";
      }
      os << "S\n";
      std::vector<std::string> cells;
      std::size_t width = 0;
      for (int i = 0; i < r; ++i) {
        for (int k = 0; k < r; ++k) {
          cells.push_back(complex_text(md.s(i, k)));
          width = std::max(width, cells.back().size());
        }
      }
      for (int i = 0; i < r; ++i) {
        for (int k = 0; k < r; ++k) os << (k ? " " : "  ") << std::setw(static_cast<int>(width)) << cells[i * r + k];
        os << "\n";
      }
      os << "T = exp(2 pi i t), t:";
      for (const auto& e : res["t_exponents"]) os << " " << e.get<std::string>();
      os << "\n";
      os << "degenerate labels:";
      for (int l : res["degenerate_labels"]) os << " " << md.labels[l].descriptor;
      os << "\n";
      os << "axioms: partial " << (ax.partial_ok() ? "ok" : "FAILED") << ", full " << (ax.full_ok() ? "ok" : "FAILED") << "\n";
      return os.str();
    });
    if (!ax.partial_ok()) {
      out.exit_code = kExitVerification;
      out.error = "modular axioms fail for " + md.model;
    }
    return out;
  });
}

CommandResult cmd_classify(const std::string& model, const RunOptions& opt) {
  return guarded([&] {
    require_format(opt, {"json", "table"});
    const ModularData md = build_model(model);
    SearchLimits lim;
    lim.max_nodes = opt.max_nodes;
    lim.jobs = opt.jobs;
    lim.tolerance = opt.tolerance;
    SearchResult sr;
    try {
      sr = enumerate_physical(md, lim);
    } catch (const SearchTruncated& e) {
      sr = e.partial;
      sr.truncated = true;
    }
    json res;
    res["model"] = md.model;
    res["complete"] = !sr.truncated;
    res["nodes"] = sr.nodes;
    res["frontier"] = sr.frontier;
    json invs = json::array();
    std::map<std::string, int> summary{{"permutation", 0}, {"type_I", 0}, {"type_II", 0}, {"heterotic", 0}, {"exceptional", 0}};
    for (std::size_t k = 0; k < sr.invariants.size(); ++k) {
      json inv = classification_json(md, sr.invariants[k], opt);
      inv["index"] = k;
      if (inv["permutation"].get<bool>()) ++summary["permutation"];
      if (inv["exceptional"].get<bool>()) ++summary["exceptional"];
      const std::string type = inv["type"];
      ++summary[type == "heterotic" ? "heterotic" : "type_" + type];
      invs.push_back(inv);
    }
    res["count"] = invs.size();
    res["summary"] = summary;
    res["invariants"] = invs;
    CommandResult out = finish(document("classify", md.model, opt, res), opt, [&] {
      std::ostringstream os;
      os << "model " << md.model << ": " << invs.size() << " invariants" << (sr.truncated ? " (TRUNCATED)" : "") << "\n";
      for (const auto& inv : invs) os << "#" << inv["index"].get<std::size_t>() << " " << classification_text(inv);
      return os.str();
    });
    if (sr.truncated) {
      out.exit_code = kExitTruncated;
      out.error = "search truncated after " + std::to_string(sr.nodes) + " nodes";
    }
    return out;
  });
}

CommandResult cmd_nimrep(const NimrepRequest& req, const RunOptions& opt) {
  return guarded([&] {
    require_format(opt, {"json", "table", "dot"});
    const ModularData md = build_model(req.model);
    const json* src = &req.invariant;
    if (src->contains("result")) src = &(*src)["result"];
    IntMatrix z;
    if (src->contains("invariants")) {
      if (src->contains("model") && (*src)["model"].get<std::string>() != md.model) {
        throw InvalidInput("invariant file is for model " + (*src)["model"].get<std::string>() + ", not " + md.model);
      }
      const json& list = (*src)["invariants"];
      if (req.index < 0 || req.index >= static_cast<int>(list.size())) {
        throw InvalidInput("invariant index " + std::to_string(req.index) + " out of range (file has " +
                           std::to_string(list.size()) + ")");
      }
      z = matrix_from_json(list[req.index]["matrix"], md.rank());
    } else if (src->contains("matrix")) {
      z = matrix_from_json((*src)["matrix"], md.rank());
    } else {
      throw InvalidInput("invariant file needs \"invariants\" or \"matrix\"");
    }
    std::optional<FusionGraph> given;
    if (req.graph) given = graph_from_json(*req.graph);
    int gen = -1;
    if (!req.generator.empty()) {
      gen = label_of(md, req.generator);
    } else if (given && !given->generator.empty()) {
      gen = label_of(md, given->generator);
    } else if (const auto f = single_generator(md)) {
      gen = *f;
    } else {
      throw InvalidInput(md.model + " has no single generator; pass --generator");
    }
    const std::string gen_name = md.labels[gen].descriptor;
    json res{{"model", md.model}, {"mode", req.mode}, {"generator", gen_name}, {"trace", z.trace()}};
    std::vector<FusionGraph> graphs;
    int exit_code = kExitOk;
    std::string error;
    if (req.mode == "verify") {
      if (!given) throw InvalidInput("verify mode needs --graph");
      Nimrep nim;
      nim.dim = given->size();
      nim.g[gen] = given->adjacency;
      const NimrepReport rep = verify_nimrep(md, z, nim, opt.tolerance);
      json checks = json::array();
      for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      res["passed"] = rep.passed();
      res["checks"] = checks;
      FusionGraph g = *given;
      g.generator = gen_name;
      graphs.push_back(g);
      if (!rep.passed()) {
        exit_code = kExitVerification;
        for (const auto& c : rep.checks) {
          if (!c.passed) {
            error = "nimrep check '" + c.name + "' failed" + (c.detail.empty() ? "" : ": " + c.detail);
            break;
          }
        }
      }
    } else if (req.mode == "search") {
      try {
        for (const Nimrep& nim : search_nimrep(md, z, gen, 12, opt.max_nodes, opt.jobs)) {
          FusionGraph g = nimrep_graph(nim, gen);
          g.generator = gen_name;
          graphs.push_back(g);
        }
        res["complete"] = true;
      } catch (const NimrepSearchTruncated& e) {
        res["complete"] = false;
        exit_code = kExitTruncated;
        error = e.what();
      }
    } else {
      throw InvalidInput("mode must be verify or search");
    }
    json gj = json::array();
    for (const auto& g : graphs) {
      json j = graph_to_json(g);
      const std::string ade = ade_name(g);
      j["ade"] = ade.empty() ? json(nullptr) : json(ade);
      gj.push_back(j);
    }
    res["count"] = graphs.size();
    res["graphs"] = gj;
    CommandResult out = finish(document("nimrep", md.model, opt, res), opt, [&] {
      std::ostringstream os;
      if (opt.format == "dot") {
        for (std::size_t k = 0; k < graphs.size(); ++k) os << export_dot(graphs[k], "nimrep" + std::to_string(k));
        return os.str();
      }
      os << "model " << md.model << ", generator " << gen_name << ", tr Z = " << z.trace() << ", " << req.mode << "\n";
      if (res.contains("checks")) {
        for (const auto& c : res["checks"]) {
          os << "  " << (c["passed"].get<bool>() ? "ok    " : "FAILED") << " " << c["name"].get<std::string>();
          if (!c["detail"].get<std::string>().empty()) os << ": " << c["detail"].get<std::string>();
          os << "\n";
        }
      }
      for (std::size_t k = 0; k < graphs.size(); ++k) {
        os << "graph " << k << ": " << graphs[k].size() << " vertices";
        if (!gj[k]["ade"].is_null()) os << " (" << gj[k]["ade"].get<std::string>() << ")";
        os << "\n" << int_table(graphs[k].adjacency);
      }
      return os.str();
    });
    out.exit_code = exit_code;
    out.error = error;
    return out;
  });
}

CommandResult cmd_orbifold(const json& graph, const std::string& action, const RunOptions& opt) {
  return guarded([&] {
    require_format(opt, {"json", "table", "dot"});
    const FusionGraph g = graph_from_json(graph);
    std::vector<int> perm;
    if (graph.contains("actions") && graph["actions"].contains(action)) {
      perm = graph["actions"][action].get<std::vector<int>>();
    } else {
      std::stringstream ss(action);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          std::size_t used = 0;
          perm.push_back(std::stoi(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
          std::string known;
          if (graph.contains("actions")) {
            for (const auto& [name, v] : graph["actions"].items()) known += " " + name;
          }
          throw InvalidInput("action '" + action + "' is neither a permutation nor a named action" +
                             (known.empty() ? "" : " (available:" + known + ")"));
        }
      }
    }
    const OrbifoldResult orb = orbifold_graph(g, perm);
    const bool pf_ok = std::abs(orb.pf_out - orb.pf_in) <= 1e-10;
    json res;
    res["action"] = perm;
    res["order"] = orb.order;
    res["vertices_in"] = g.size();
    res["vertices_out"] = orb.graph.size();
    res["grading_kept"] = orb.grading_kept;
    res["pf_in"] = orb.pf_in;
    res["pf_out"] = orb.pf_out;
    res["pf_preserved"] = pf_ok;
    res["dual_action"] = orb.dual_action;
    res["graph"] = graph_to_json(orb.graph);
    json model = graph.contains("model") ? graph["model"] : json(nullptr);
    CommandResult out = finish(document("orbifold", model, opt, res), opt, [&] {
      if (opt.format == "dot") return export_dot(orb.graph, "orbifold");
      std::ostringstream os;
      os << g.size() << " -> " << orb.graph.size() << " vertices, order " << orb.order << ", PF " << fixed(orb.pf_in, 12)
         << " -> " << fixed(orb.pf_out, 12) << ", grading " << (orb.grading_kept ? "kept" : "lost") << "\n";
      for (int v = 0; v < orb.graph.size(); ++v) os << "  " << v << " " << orb.graph.names[v] << "\n";
      return os.str() + int_table(orb.graph.adjacency);
    });
    if (!pf_ok) {
      out.exit_code = kExitVerification;
      out.error = "Perron-Frobenius eigenvalue changed from " + fixed(orb.pf_in, 12) + " to " + fixed(orb.pf_out, 12);
    }
    return out;
  });
}

CommandResult cmd_embeddings(const std::string& name, const std::string& ext, const RunOptions& opt) {
  return guarded([&] {
    require_format(opt, {"json", "table"});
    const auto& lib = builtin_fixtures().embeddings;
    const auto it = lib.find(name);
    if (it == lib.end()) {
      std::string known;
      for (const auto& n : embedding_names()) known += " " + n;
      throw InvalidInput("unknown embedding '" + name + "'; available:" + known);
    }
    const EmbeddingFixture& f = it->second;
    const ModularData base = build_model(f.table.base_model);
    IntMatrix zext;
    if (ext == "identity") {
      zext = IntMatrix::Identity(f.table.extended_rank(), f.table.extended_rank());
    } else if (ext == "conjugation") {
      zext = extended_permutation(f.table, f.ext_conj);
    } else if (f.automorphisms.count(ext)) {
      zext = extended_permutation(f.table, f.automorphisms.at(ext));
    } else {
      std::string known = " identity conjugation";
      for (const auto& [n, a] : f.automorphisms) known += " " + n;
      throw InvalidInput("unknown extended invariant '" + ext + "' for " + name + "; available:" + known);
    }
    IntMatrix z;
    std::string inconsistent;
    try {
      z = restrict_invariant(base, f.table, zext);
    } catch (const BranchingInconsistent& e) {
      z = e.z;
      inconsistent = e.what();
    }
    json res = inconsistent.empty() ? classification_json(base, z, opt) : json{{"matrix", matrix_json(z)}};
    res["name"] = name;
    res["base_model"] = base.model;
    res["ext"] = ext;
    res["extended_labels"] = f.table.extended_labels;
    res["extended_matrix"] = matrix_json(zext);
    res["source"] = f.table.source;
    res["consistent"] = inconsistent.empty();
    const auto exp = f.expected.find(ext);
    res["matches_expected"] = exp == f.expected.end() ? json(nullptr) : json(exp->second == z);
    int nonzero_diag = 0;
    for (int l = 0; l < z.rows(); ++l) nonzero_diag += z(l, l) != 0;
    res["nonzero_diagonal_cells"] = nonzero_diag;
    CommandResult out = finish(document("embeddings", base.model, opt, res), opt, [&] {
      std::ostringstream os;
      os << name << " (" << f.table.source << "), extended invariant " << ext << "\n";
      if (!inconsistent.empty()) return os.str() + "inconsistent: " + inconsistent + "\n" + int_table(z);
      if (!res["matches_expected"].is_null()) {
        os << "expected matrix: " << (res["matches_expected"].get<bool>() ? "matches" : "DIFFERS") << "\n";
      }
      return os.str() + classification_text(res);
    });
    if (!inconsistent.empty()) {
      out.exit_code = kExitVerification;
      out.error = inconsistent;
    } else if (res["matches_expected"].is_boolean() && !res["matches_expected"].get<bool>()) {
      out.exit_code = kExitVerification;
      out.error = "restricted invariant differs from the fixture's expected matrix";
    }
    return out;
  });
}

}  // namespace modinv
