#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "clustersend/cli.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw clustersend::ConfigError("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

clustersend::ScenarioConfig load_scenario(const std::string& path) {
  return clustersend::scenario_from_json_text(read_file(path));
}

std::vector<clustersend::FailureModel> parse_models(const std::string& text) {
  std::vector<clustersend::FailureModel> out;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(clustersend::failure_model_from_string(tok));
  return out;
}

std::vector<clustersend::SigningScheme> parse_signings(const std::string& text) {
  std::vector<clustersend::SigningScheme> out;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(clustersend::signing_scheme_from_string(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fault-tolerant cluster-to-cluster sending: bounds, runs, verification, sweeps"};
  app.require_subcommand(1);

  std::string config_path, out_path, protocol_flag, mutate_text, format = "csv";
  bool compact = false;
  std::uint64_t seed_flag = 0, budget = 512;
  int extremal_seeds = 50, max_enum = 6;
  std::string n1_list, f1_list, n2_list, f2_list;
  std::string models_text = "byzantine", signings_text = "replica";
  long long value_bytes = 4, sig_unit = 1;

  auto* bounds_cmd = app.add_subcommand("bounds", "lower bounds and protocol selection");
  bounds_cmd->add_option("--config", config_path, "scenario json")->required();
  bounds_cmd->add_option("--out", out_path, "write the json here instead of stdout");

  auto* run_cmd = app.add_subcommand("run", "execute one protocol run");
  run_cmd->add_option("--config", config_path, "scenario json")->required();
  run_cmd->add_option("--out", out_path, "write the full transcript json here");
  run_cmd->add_option("--protocol", protocol_flag, "override the scenario's protocol");
  run_cmd->add_flag("--compact-certs", compact, "value bytes only where required");
  run_cmd->add_option("--seed", seed_flag, "override the delivery-order seed");
  run_cmd->add_option("--mutate", mutate_text, "plan mutation, e.g. s1=-1 or threshold=-1");

  auto* verify_cmd = app.add_subcommand("verify", "exhaustive adversarial campaign");
  verify_cmd->add_option("--config", config_path, "scenario json")->required();
  verify_cmd->add_option("--out", out_path, "write a counterexample json here");
  verify_cmd->add_option("--protocol", protocol_flag, "override the scenario's protocol");
  verify_cmd->add_flag("--compact-certs", compact, "value bytes only where required");
  verify_cmd->add_option("--mutate", mutate_text, "plan mutation, e.g. s1=-1 or threshold=-1");
  verify_cmd->add_option("--budget", budget, "adversary scripts per fault placement");
  verify_cmd->add_option("--seeds", extremal_seeds, "extra schedule seeds on the extreme script");
  verify_cmd->add_option("--max-enum", max_enum, "largest cluster size to verify exhaustively");

  auto* sweep_cmd = app.add_subcommand("sweep", "tabulate costs and properties over a grid");
  sweep_cmd->add_option("--n1", n1_list, "sender sizes, e.g. 2,4..6")->required();
  sweep_cmd->add_option("--f1", f1_list, "sender fault counts")->required();
  sweep_cmd->add_option("--n2", n2_list, "receiver sizes")->required();
  sweep_cmd->add_option("--f2", f2_list, "receiver fault counts")->required();
  sweep_cmd->add_option("--model", models_text, "failure models, comma separated");
  sweep_cmd->add_option("--signing", signings_text, "signing schemes, comma separated");
  sweep_cmd->add_option("--protocol", protocol_flag, "fixed protocol instead of selection");
  sweep_cmd->add_flag("--compact-certs", compact, "value bytes only where required");
  sweep_cmd->add_option("--format", format, "csv or jsonl");
  sweep_cmd->add_option("--out", out_path, "write the table here instead of stdout");
  sweep_cmd->add_option("--max-enum", max_enum, "exhaustive placements at or below this size");
  sweep_cmd->add_option("--seed", seed_flag, "base schedule seed");
  sweep_cmd->add_option("--value-bytes", value_bytes, "payload size for the size columns");
  sweep_cmd->add_option("--sig-unit", sig_unit, "size units per signature");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  using namespace clustersend;
  try {
    if (bounds_cmd->parsed()) return cli::cmd_bounds(load_scenario(config_path), out_path, std::cout);
    if (run_cmd->parsed()) {
      cli::RunArgs args;
      args.cfg = load_scenario(config_path);
      if (!protocol_flag.empty()) args.cfg.protocol = protocol_flag;
      if (compact) args.cfg.compact = true;
      if (run_cmd->count("--seed")) args.cfg.seed = seed_flag;
      args.mutation = cli::parse_mutation(mutate_text);
      args.out_path = out_path;
      return cli::cmd_run(args, std::cout);
    }
    if (verify_cmd->parsed()) {
      cli::VerifyArgs args;
      args.cfg = load_scenario(config_path);
      if (!protocol_flag.empty()) args.cfg.protocol = protocol_flag;
      if (compact) args.cfg.compact = true;
      args.mutation = cli::parse_mutation(mutate_text);
      args.budget = budget;
      args.extremal_seeds = extremal_seeds;
      args.max_enum = max_enum;
      args.out_path = out_path;
      return cli::cmd_verify(args, std::cout);
    }
    cli::SweepArgs args;
    args.cells = cli::make_grid_cells(
        cli::parse_int_list(n1_list), cli::parse_int_list(f1_list), cli::parse_int_list(n2_list),
        cli::parse_int_list(f2_list), parse_models(models_text), parse_signings(signings_text),
        protocol_flag.empty() ? std::string("auto") : protocol_flag, compact);
    args.options.max_enum = max_enum;
    args.options.value_bytes = value_bytes;
    args.options.sig_unit = sig_unit;
    if (sweep_cmd->count("--seed")) args.options.seeds = {seed_flag, seed_flag + 1, seed_flag + 2};
    args.format = format;
    args.out_path = out_path;
    return cli::cmd_sweep(args, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
