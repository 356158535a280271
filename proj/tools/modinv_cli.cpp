#include "modinv/cli.hpp"
#include "modinv/model_spec.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return nlohmann::json::parse(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modular invariants, fusion data and nimrep graphs.\n\n" + modinv::model_spec_grammar()};
  app.require_subcommand(1);
  app.fallthrough();
  modinv::RunOptions opt;
  std::string out_path;
  app.add_option("--format", opt.format, "json, table or dot (where supported)")->capture_default_str();
  app.add_option("--tolerance", opt.tolerance, "numerical tolerance")->capture_default_str();
  app.add_option("--max-nodes", opt.max_nodes, "search node limit per branch")->capture_default_str();
  app.add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", out_path, "write output to FILE instead of stdout");

  std::string model;
  auto* data = app.add_subcommand("data", "S, T, fusion rules, dimensions, Gauss sum and degeneracy");
  data->add_option("--model", model, "model spec")->required();

  auto* classify = app.add_subcommand("classify", "enumerate and classify all physical invariants");
  classify->add_option("--model", model, "model spec")->required();

  modinv::NimrepRequest nim;
  std::string invariant_path, graph_path;
  auto* nimrep = app.add_subcommand("nimrep", "verify a graph against an invariant, or search for nimreps");
  nimrep->add_option("--model", nim.model, "model spec")->required();
  nimrep->add_option("--invariant", invariant_path, "classify output or {\"matrix\": ...}")->required()->check(CLI::ExistingFile);
  nimrep->add_option("--index", nim.index, "invariant index in classify output")->capture_default_str();
  nimrep->add_option("--mode", nim.mode, "verify or search")->check(CLI::IsMember({"verify", "search"}))->capture_default_str();
  nimrep->add_option("--graph", graph_path, "graph JSON (verify mode)")->check(CLI::ExistingFile);
  nimrep->add_option("--generator", nim.generator, "generator label descriptor");

  std::string action;
  auto* orbifold = app.add_subcommand("orbifold", "quotient a graph by a cyclic automorphism");
  orbifold->add_option("--graph", graph_path, "graph JSON")->required()->check(CLI::ExistingFile);
  orbifold->add_option("--action", action, "named action from the graph file, or a permutation like 2,1,3,0")->required();

  std::string name, ext = "identity";
  auto* embeddings = app.add_subcommand("embeddings", "restrict an extended invariant through a shipped branching table");
  embeddings->add_option("name", name, "fixture name")->required();
  embeddings->add_option("--ext", ext, "identity, conjugation or a named automorphism")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? modinv::kExitOk : modinv::kExitInvalid;
  }

  modinv::CommandResult res;
  try {
    if (*data) {
      res = modinv::cmd_data(model, opt);
    } else if (*classify) {
      res = modinv::cmd_classify(model, opt);
    } else if (*nimrep) {
      nim.invariant = read_json(invariant_path);
      if (!graph_path.empty()) nim.graph = read_json(graph_path);
      res = modinv::cmd_nimrep(nim, opt);
    } else if (*orbifold) {
      res = modinv::cmd_orbifold(read_json(graph_path), action, opt);
    } else {
      res = modinv::cmd_embeddings(name, ext, opt);
    }
  } catch (const std::invalid_argument& e) {
    res = {modinv::kExitInvalid, "", e.what(), nullptr};
  } catch (const nlohmann::json::exception& e) {
    res = {modinv::kExitInvalid, "", std::string("malformed JSON input: ") + e.what(), nullptr};
  }
  if (!res.error.empty()) std::cerr << "modinv: " << res.error << "\n";
  if (!res.output.empty()) {
    if (out_path.empty()) {
      std::cout << res.output;
    } else {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "modinv: cannot write " << out_path << "\n";
        return modinv::kExitInvalid;
      }
      out << res.output;
    }
  }
  return res.exit_code;
}
