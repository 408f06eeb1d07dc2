#include "ccprobe/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "ccprobe/dataset.hpp"
#include "ccprobe/error.hpp"
#include "ccprobe/hash.hpp"
#include "ccprobe/report.hpp"

namespace ccprobe {

using nlohmann::json;

void RunConfig::validate() const {
  if (network_path.empty()) throw config_error("no network given (use --network)");
  if (library_source.empty()) throw config_error("no concept library given (use --library)");
  if (states_path && synth_count) throw config_error("give either --states or --synth, not both");
  if (synth_count && *synth_count == 0) throw config_error("--synth needs at least one state");
  for (const auto& f : formats)
    if (f != "json" && f != "md") throw config_error("unknown report format '" + f + "' (expected json or md)");
  match.validate();
}

namespace {

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

struct Pipeline {
  NetworkSpec net;
  ConceptLibrary library;
  StateTable states;
  Manifest manifest;
};

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int active_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write '" + path.string() + "'");
  out << text;
}

/// Values from a JSON config file take precedence over command-line flags.
void apply_config_file(const std::string& path, RunConfig& cfg) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw config_error("malformed config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw config_error("config file '" + path + "' must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "network") cfg.network_path = value.get<std::string>();
      else if (key == "library") cfg.library_source = value.get<std::string>();
      else if (key == "states") { cfg.states_path = value.get<std::string>(); cfg.synth_count.reset(); }
      else if (key == "synth") { cfg.synth_count = value.get<std::size_t>(); cfg.states_path.reset(); }
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "layer") cfg.layer = value.get<std::size_t>();
      else if (key == "beam_width") cfg.match.beam_width = value.get<std::size_t>();
      else if (key == "max_length") cfg.match.max_length = value.get<std::size_t>();
      else if (key == "beta") cfg.match.beta = value.get<double>();
      else if (key == "min_active_frac") cfg.match.min_active_frac = value.get<double>();
      else if (key == "dedupe") cfg.match.dedupe = value.get<bool>();
      else if (key == "strict_pairs")
        cfg.match.expansion = value.get<bool>() ? Expansion::beam_pairs : Expansion::with_literals;
      else if (key == "out") cfg.output_dir = value.get<std::string>();
      else if (key == "run_id") cfg.run_id = value.get<std::string>();
      else if (key == "threads") cfg.threads = value.get<int>();
      else if (key == "formats") cfg.formats = value.get<std::vector<std::string>>();
      else throw config_error("unknown key '" + key + "' in config file '" + path + "'");
    }
  } catch (const json::exception& e) {
    throw config_error("bad value in config file '" + path + "': " + e.what());
  }
}

Pipeline load_pipeline(const RunConfig& cfg) {
  cfg.validate();
  Pipeline p;
  p.net = load_network(cfg.network_path);
  p.library = resolve_library(cfg.library_source);
  if (p.net.input_dim() != p.library.schema().size())
    throw data_error("network '" + cfg.network_path + "' expects " + std::to_string(p.net.input_dim()) +
                     " inputs but library '" + p.library.name() + "' has " +
                     std::to_string(p.library.schema().size()) + " dimensions");
  p.net.hidden_width(cfg.layer);
  if (cfg.states_path)
    p.states = load_states(*cfg.states_path, p.library.schema());
  else
    p.states = sample_states(p.library.schema(), cfg.synth_count.value_or(10'000), cfg.seed);

  Manifest& m = p.manifest;
  m.run_id = cfg.run_id;
  m.tool_version = std::string(kToolVersion);
  m.network_source = cfg.network_path;
  m.network_sha256 = sha256_hex(save_network(p.net));
  for (std::size_t l = 1; l <= p.net.hidden_layers(); ++l) m.hidden_widths.push_back(p.net.hidden_width(l));
  m.action_labels = p.net.action_labels();
  m.output_kind = p.net.output_kind();
  m.library_name = p.library.name();
  m.library_source = cfg.library_source;
  m.library_sha256 = sha256_hex(save_concept_library(p.library));
  for (const auto& d : p.library.schema().dims()) m.dimensions.push_back(d.name);
  m.state_source = cfg.states_path ? "file:" + *cfg.states_path : "synthetic";
  m.states_sha256 = sha256_hex(format_states(p.states, StateFormat::csv));
  m.state_count = p.states.rows();
  if (!cfg.states_path) m.seed = cfg.seed;
  m.layer = cfg.layer;
  m.config = cfg.match;
  return p;
}

bool wants(const RunConfig& cfg, std::string_view format) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

void write_run_manifest(const RunConfig& cfg, const Manifest& m, const std::vector<std::string>& argv,
                        double seconds, const std::filesystem::path& dir) {
  ReportBundle empty{m, {}, {}, {}, {}};
  json j = json::parse(render_json(empty)).at("manifest");
  j["command_line"] = argv;
  j["threads"] = active_threads();
  j["wall_time_seconds"] = seconds;
  j["formats"] = cfg.formats;
  write_text(dir / (cfg.run_id + ".manifest.json"), j.dump(2) + "\n");
}

std::filesystem::path prepare_output(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw config_error("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
  return dir;
}

std::vector<std::vector<double>> weights_for(const NetworkSpec& net, const std::vector<MatchResult>& results) {
  std::vector<std::vector<double>> out;
  for (const auto& r : results) out.push_back(output_weights(net, r.neuron));
  return out;
}

std::vector<double> parse_state_values(const std::string& text, const StateSchema& schema) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw config_error("--state entry '" + cell + "' is not a number");
    }
  }
  if (values.size() != schema.size())
    throw config_error("--state has " + std::to_string(values.size()) + " values; the schema has " +
                       std::to_string(schema.size()) + " dimensions");
  return values;
}

std::vector<StateEdit> parse_edits(const std::string& text, const StateSchema& schema) {
  std::vector<StateEdit> edits;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw config_error("edit '" + item + "' must look like <dimension>=<value>");
    const std::string name = item.substr(0, eq);
    const auto dim = schema.find(name);
    if (!dim) throw config_error("edit names unknown dimension '" + name + "'");
    try {
      edits.push_back({*dim, std::stod(item.substr(eq + 1))});
    } catch (const std::exception&) {
      throw config_error("edit '" + item + "' has a non-numeric value");
    }
  }
  return edits;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_extract(const RunConfig& cfg, const std::vector<std::string>& argv, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  Pipeline p = load_pipeline(cfg);
  const auto dir = prepare_output(cfg);
  ReportBundle bundle;
  bundle.manifest = p.manifest;
  bundle.results = extract_all(p.net, p.states, p.library, cfg.match, cfg.layer);
  bundle.result_weights = weights_for(p.net, bundle.results);
  validate_bundle(bundle);
  if (wants(cfg, "json")) write_text(dir / (cfg.run_id + ".match.json"), render_json(bundle));
  if (wants(cfg, "md")) write_text(dir / (cfg.run_id + ".md"), render_markdown(bundle));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_manifest(cfg, p.manifest, argv, seconds, dir);
  out << "matched " << bundle.results.size() << " active neurons of hidden layer " << cfg.layer << " ("
      << p.states.rows() << " states, " << p.library.size() << " atoms) in " << seconds << " s\n";
  return kExitOk;
}

int cmd_match(const RunConfig& cfg, std::size_t neuron_index, bool exhaustive, std::size_t budget,
              const std::vector<std::string>& argv, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  Pipeline p = load_pipeline(cfg);
  const NeuronRef neuron{cfg.layer, neuron_index};
  p.net.check(neuron);
  const auto dir = prepare_output(cfg);
  const ActivationTrace trace = forward(p.net, p.states);
  const std::vector<BitVector> atom_bits = eval_atoms(p.library, p.states);
  ReportBundle bundle;
  bundle.manifest = p.manifest;
  bundle.results.push_back(match_neuron(trace, neuron, p.library, atom_bits, cfg.match));
  bundle.result_weights = weights_for(p.net, bundle.results);
  const MatchResult& r = bundle.results.front();
  out << "neuron " << neuron.index << " (layer " << neuron.layer << "): jaccard " << format_double(r.score)
      << ", length " << r.length << ", formula " << print_formula(r.formula) << "\n";
  json oracle;
  if (exhaustive) {
    const BitVector target = binarize(trace, neuron, cfg.match.beta);
    const SearchResult best = exhaustive_search(target, p.library, atom_bits, cfg.match.max_length, budget);
    out << "exhaustive: jaccard " << format_double(best.score) << ", formula " << print_formula(best.formula)
        << "\nbeam score " << (best.score == r.score ? "equals" : "is below") << " the exhaustive optimum (gap "
        << format_double(best.score - r.score) << ")\n";
    oracle = json{{"beam_score", r.score},
                  {"exhaustive_score", best.score},
                  {"exhaustive_formula", print_formula(best.formula)}};
  }
  if (wants(cfg, "json")) write_text(dir / (cfg.run_id + ".match.json"), render_json(bundle));
  if (wants(cfg, "md")) write_text(dir / (cfg.run_id + ".md"), render_markdown(bundle));
  if (exhaustive) write_text(dir / (cfg.run_id + ".oracle.json"), oracle.dump(2) + "\n");
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_manifest(cfg, p.manifest, argv, seconds, dir);
  return kExitOk;
}

struct PerturbOptions {
  std::size_t neuron = 0;
  std::optional<std::string> state;
  std::optional<std::size_t> row;
  std::optional<std::string> edits;
  std::optional<std::string> formula;
};

int cmd_perturb(const RunConfig& cfg, const PerturbOptions& opt, const std::vector<std::string>& argv,
                std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (opt.state && opt.row) throw config_error("give either --state or --row, not both");
  if (!opt.state && !opt.row) throw config_error("perturb needs a state (--state v1,v2,... or --row k)");
  Pipeline p = load_pipeline(cfg);
  const NeuronRef neuron{cfg.layer, opt.neuron};
  p.net.check(neuron);
  const auto dir = prepare_output(cfg);

  std::vector<double> original;
  if (opt.state) {
    original = parse_state_values(*opt.state, p.library.schema());
  } else {
    if (*opt.row >= p.states.rows())
      throw config_error("--row " + std::to_string(*opt.row) + " is out of range (" +
                         std::to_string(p.states.rows()) + " states)");
    auto r = p.states.row(*opt.row);
    original.assign(r.begin(), r.end());
  }

  ReportBundle bundle;
  bundle.manifest = p.manifest;
  Formula formula;
  if (opt.formula) {
    formula = parse_formula(*opt.formula, p.library);
  } else {
    const ActivationTrace trace = forward(p.net, p.states);
    const std::vector<BitVector> atom_bits = eval_atoms(p.library, p.states);
    bundle.results.push_back(match_neuron(trace, neuron, p.library, atom_bits, cfg.match));
    bundle.result_weights = weights_for(p.net, bundle.results);
    formula = bundle.results.front().formula;
    out << "matched concept for neuron " << neuron.index << ": " << print_formula(formula) << " (jaccard "
        << format_double(bundle.results.front().score) << ")\n";
  }

  std::vector<StateEdit> edits;
  if (opt.edits) {
    edits = parse_edits(*opt.edits, p.library.schema());
  } else {
    edits = {suggest_edits(formula, original, p.library).front()};
    out << "suggested edit: " << p.library.schema()[edits.front().dim].name << "=" << format_double(edits.front().value)
        << "\n";
  }
  PerturbationCase c = run_perturbation(p.net, neuron, formula, original, edits, p.library, cfg.match.beta);
  bundle.cases.push_back(c);
  bundle.case_weights.push_back(output_weights(p.net, neuron));
  validate_bundle(bundle);

  const auto& labels = p.net.action_labels();
  out << "concept " << c.concept_before << " -> " << c.concept_after << ", activation "
      << format_double(c.original_activation) << " -> " << format_double(c.perturbed_activation);
  if (p.net.output_kind() == OutputKind::action_values)
    out << ", action " << labels[c.original_action] << " -> " << labels[c.perturbed_action];
  else
    out << ", output change (L2) " << format_double(c.output_delta_l2);
  out << ", verdict " << to_string(c.verdict) << "\n";

  if (wants(cfg, "json")) write_text(dir / (cfg.run_id + ".perturb.json"), render_json(bundle));
  if (wants(cfg, "md")) write_text(dir / (cfg.run_id + ".md"), render_markdown(bundle));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_manifest(cfg, p.manifest, argv, seconds, dir);
  return kExitOk;
}

int cmd_report(const std::string& input, const std::optional<std::string>& perturb_input,
               const std::string& format, const std::optional<std::string>& output, std::ostream& out) {
  ReportBundle bundle = load_bundle(read_text(input));
  if (perturb_input) bundle = merge_bundles(bundle, load_bundle(read_text(*perturb_input)));
  std::string text;
  if (format == "md")
    text = render_markdown(bundle);
  else if (format == "json")
    text = render_json(bundle);
  else
    throw config_error("unknown report format '" + format + "' (expected md or json)");
  if (output)
    write_text(*output, text);
  else
    out << text;
  return kExitOk;
}

struct OracleOptions {
  std::size_t instances = 50;
  std::size_t atoms = 6;
  std::size_t states = 512;
  std::size_t max_length = 3;
  std::uint64_t seed = 0;
  std::size_t budget = kDefaultExhaustiveBudget;
};

/// Random atom bitvectors and a random target; reports beam vs exhaustive on every instance.
int cmd_oracle_check(const OracleOptions& opt, const MatchConfig& base, std::ostream& out) {
  if (opt.atoms == 0 || opt.states == 0 || opt.instances == 0)
    throw config_error("oracle-check needs at least one instance, atom and state");
  std::mt19937_64 rng(opt.seed);
  std::vector<AtomicConcept> atoms;
  std::vector<DimensionSchema> dims;
  for (std::size_t i = 0; i < opt.atoms; ++i) {
    dims.push_back({"d" + std::to_string(i), DimensionKind::binary, 0.0, 1.0});
    atoms.push_back({"A" + std::to_string(i), i, IsTrue{}, ""});
  }
  const ConceptLibrary library("oracle", StateSchema(dims), atoms);
  MatchConfig cfg = base;
  cfg.max_length = opt.max_length;

  std::size_t equal = 0;
  std::size_t violations = 0;
  double worst_gap = 0.0;
  for (std::size_t inst = 0; inst < opt.instances; ++inst) {
    std::vector<BitVector> bits(opt.atoms, BitVector(opt.states));
    std::uniform_real_distribution<double> density(0.2, 0.8);
    for (auto& b : bits) {
      std::bernoulli_distribution coin(density(rng));
      for (std::size_t s = 0; s < opt.states; ++s) b.set(s, coin(rng));
    }
    BitVector target(opt.states);
    std::bernoulli_distribution coin(density(rng));
    for (std::size_t s = 0; s < opt.states; ++s) target.set(s, coin(rng));
    const SearchResult beam = beam_search(target, library, bits, cfg);
    const SearchResult best = exhaustive_search(target, library, bits, opt.max_length, opt.budget);
    const double gap = best.score - beam.score;
    if (gap < 0) ++violations;
    if (beam.score == best.score) ++equal;
    worst_gap = std::max(worst_gap, gap);
    if (gap != 0.0)
      out << "instance " << inst << ": beam " << format_double(beam.score) << " " << print_formula(beam.formula)
          << " vs exhaustive " << format_double(best.score) << " " << print_formula(best.formula) << "\n";
  }
  out << "oracle-check: " << equal << "/" << opt.instances << " instances where beam reaches the exhaustive optimum; "
      << violations << " where beam exceeds it; largest gap " << format_double(worst_gap) << "\n";
  return violations == 0 ? kExitOk : kExitData;
}

// ---------------------------------------------------------------------------
// Argument wiring
// ---------------------------------------------------------------------------

struct CommonFlags {
  RunConfig cfg;
  std::optional<std::string> states;
  std::optional<std::size_t> synth;
  std::optional<std::string> config_file;
  bool no_dedupe = false;
  bool strict_pairs = false;
  std::string formats = "json,md";
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--network", f.cfg.network_path, "Weight file (JSON)");
  app->add_option("--library", f.cfg.library_source, "Concept library: builtin:lunarlander, builtin:blackjack or a path");
  app->add_option("--states", f.states, "State samples (CSV with header, or JSON lines)");
  app->add_option("--synth", f.synth, "Sample this many states uniformly within the schema bounds");
  app->add_option("--seed", f.cfg.seed, "Seed for --synth")->capture_default_str();
  app->add_option("--layer", f.cfg.layer, "Hidden layer to probe (1-based)")->capture_default_str();
  app->add_option("--beam-width", f.cfg.match.beam_width, "Beam width")->capture_default_str();
  app->add_option("--max-length", f.cfg.match.max_length, "Maximum formula length in leaves")->capture_default_str();
  app->add_option("--beta", f.cfg.match.beta, "Activation threshold (active iff h > beta)")->capture_default_str();
  app->add_option("--min-active-frac", f.cfg.match.min_active_frac,
                  "Only neurons active in more than this fraction of states are matched")
      ->capture_default_str();
  app->add_flag("--no-dedupe", f.no_dedupe, "Keep semantically equivalent candidates in the beam");
  app->add_flag("--strict-pairs", f.strict_pairs, "Combine beam members only with each other");
  app->add_option("--out", f.cfg.output_dir, "Output directory")->capture_default_str();
  app->add_option("--run-id", f.cfg.run_id, "Prefix of the output files (default: subcommand name)");
  app->add_option("--threads", f.cfg.threads, "Worker threads (default: $CCPROBE_THREADS or all cores)");
  app->add_option("--formats", f.formats, "Comma-separated report formats: json, md")->capture_default_str();
  app->add_option("--config", f.config_file, "JSON config file; its keys override flags");
}

RunConfig finish_common(CommonFlags& f, const std::string& command) {
  RunConfig cfg = f.cfg;
  cfg.states_path = f.states;
  cfg.synth_count = f.synth;
  if (f.no_dedupe) cfg.match.dedupe = false;
  if (f.strict_pairs) cfg.match.expansion = Expansion::beam_pairs;
  cfg.formats.clear();
  std::stringstream ss(f.formats);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) cfg.formats.push_back(item);
  if (cfg.threads == 0)
    if (const char* env = std::getenv("CCPROBE_THREADS")) cfg.threads = std::atoi(env);
  if (f.config_file) apply_config_file(*f.config_file, cfg);
  if (cfg.run_id.empty()) cfg.run_id = command;
  apply_threads(cfg.threads);
  return cfg;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return kExitConfig;
    case ErrorKind::data: return kExitData;
    case ErrorKind::budget: return kExitBudget;
  }
  return kExitInternal;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explain hidden neurons of small policy/value networks with compositional boolean concepts"};
  app.name(args.empty() ? "ccprobe" : args.front());
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonFlags extract_flags, match_flags, perturb_flags;
  auto* extract = app.add_subcommand("extract", "Match every active neuron of a hidden layer");
  add_common(extract, extract_flags);

  auto* match = app.add_subcommand("match", "Match a single neuron");
  add_common(match, match_flags);
  std::size_t match_neuron_index = 0;
  bool exhaustive = false;
  std::size_t budget = kDefaultExhaustiveBudget;
  match->add_option("--neuron", match_neuron_index, "Neuron index within the layer")->required();
  match->add_flag("--exhaustive", exhaustive, "Also run the exhaustive oracle and report both scores");
  match->add_option("--budget", budget, "Candidate budget for --exhaustive")->capture_default_str();

  auto* perturb = app.add_subcommand("perturb", "Validate a neuron's concept with a targeted state edit");
  add_common(perturb, perturb_flags);
  PerturbOptions popt;
  perturb->add_option("--neuron", popt.neuron, "Neuron index within the layer")->required();
  perturb->add_option("--state", popt.state, "Original state, comma-separated in schema order");
  perturb->add_option("--row", popt.row, "Original state as a row index into the state source");
  perturb->add_option("--edits", popt.edits, "Edits as dim=value[,dim=value...]; suggested when omitted");
  perturb->add_option("--formula", popt.formula, "Concept to test; matched by beam search when omitted");

  auto* report = app.add_subcommand("report", "Re-render saved results");
  std::string report_input;
  std::optional<std::string> report_perturb;
  std::string report_format = "md";
  std::optional<std::string> report_output;
  report->add_option("--input", report_input, "A .match.json or .perturb.json file")->required();
  report->add_option("--perturb", report_perturb, "Perturbation bundle to merge into the report");
  report->add_option("--format", report_format, "md or json")->capture_default_str();
  report->add_option("--output", report_output, "Write here instead of stdout");

  auto* oracle = app.add_subcommand("oracle-check", "Compare beam search against the exhaustive oracle");
  OracleOptions oopt;
  MatchConfig oracle_cfg;
  bool oracle_strict = false;
  oracle->add_option("--instances", oopt.instances)->capture_default_str();
  oracle->add_option("--atoms", oopt.atoms)->capture_default_str();
  oracle->add_option("--states", oopt.states)->capture_default_str();
  oracle->add_option("--max-length", oopt.max_length)->capture_default_str();
  oracle->add_option("--seed", oopt.seed)->capture_default_str();
  oracle->add_option("--budget", oopt.budget)->capture_default_str();
  oracle->add_option("--beam-width", oracle_cfg.beam_width)->capture_default_str();
  oracle->add_flag("--strict-pairs", oracle_strict);

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (extract->parsed()) return cmd_extract(finish_common(extract_flags, "extract"), args, out);
    if (match->parsed())
      return cmd_match(finish_common(match_flags, "match"), match_neuron_index, exhaustive, budget, args, out);
    if (perturb->parsed()) return cmd_perturb(finish_common(perturb_flags, "perturb"), popt, args, out);
    if (report->parsed()) return cmd_report(report_input, report_perturb, report_format, report_output, out);
    if (oracle->parsed()) {
      if (oracle_strict) oracle_cfg.expansion = Expansion::beam_pairs;
      return cmd_oracle_check(oopt, oracle_cfg, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitConfig;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace ccprobe
