#include "ssd/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssd/bench.hpp"
#include "ssd/matrix_io.hpp"
#include "ssd/rng.hpp"

extern char** environ;

namespace ssd::cli {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const std::map<std::string, std::string> kDesignKeys = {
    {"m", "25"},
    {"n", "60"},
    {"l", "80"},
    {"kappa", "20"},
    {"xi", "0"},
    {"lambda", "0.25"},
    {"max_iters", "1000"},
    {"step_rule", "backtracking"},
    {"eta0", "1"},
    {"gamma", "0.9"},
    {"alpha", "0.5"},
    {"eta", "0.001"},
    {"tol_phi", "1e-8"},
    {"tol_obj", "1e-12"},
    {"tol_obj_patience", "5"},
    {"seed", "1"},
    {"threads", "1"},
    {"dictionary", "gaussian"},
    {"base", "identity"},
    {"target", "projected"},
};

const std::map<std::string, std::string> kDiagnoseKeys = {
    {"gamma", "0.9"},
    {"slack", "1e-10"},
};

std::map<std::string, std::string> sweep_keys(bool with_axis) {
  std::map<std::string, std::string> keys = {
      {"m", "25"},
      {"n", "60"},
      {"l", "80"},
      {"k", "4"},
      {"j", "2000"},
      {"snr", "20"},
      {"lambda", "0.25"},
      {"kappa", "20"},
      {"max_iters", "1000"},
      {"step_rule", "backtracking"},
      {"eta0", "1"},
      {"gamma", "0.9"},
      {"alpha", "0.5"},
      {"eta", "0.001"},
      {"tol_phi", "1e-8"},
      {"tol_obj", "1e-12"},
      {"systems", "randn,bispar,sparse,sparse-etf"},
      {"seeds", "1"},
      {"threads", "1"},
      {"psnr_bits", "8"},
  };
  if (with_axis) {
    keys["axis"] = "snr";
    keys["values"] = "10,15,20,25,30";
  }
  return keys;
}

const std::map<std::string, std::string> kBenchmarkKeys = sweep_keys(false);
const std::map<std::string, std::string> kSweepKeys = sweep_keys(true);

const std::vector<std::string> kSubcommands = {"design", "diagnose", "benchmark", "sweep"};

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidParameter, field + ": " + why);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Accepts bare values, quoted strings and TOML-style [a, "b"] lists; lists
// come back comma joined. Trailing " # comment" is dropped.
std::string clean_value(std::string raw) {
  bool quoted = false;
  char quote = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (quoted) {
      if (c == quote) quoted = false;
    } else if (c == '"' || c == '\'') {
      quoted = true;
      quote = c;
    } else if ((c == '#' || c == ';') && (i == 0 || std::isspace(static_cast<unsigned char>(raw[i - 1])))) {
      raw.resize(i);
      break;
    }
  }
  std::string v = trim(raw);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') {
    std::string joined;
    std::stringstream items(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      item = unquote(item);
      if (item.empty()) continue;
      joined += (joined.empty() ? "" : ",") + item;
    }
    return joined;
  }
  return unquote(v);
}

std::string normalize_key(std::string key) {
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  return key;
}

// `seed` is accepted everywhere; experiments take a list of them.
std::string canonical_key(const std::string& subcommand, const std::string& key) {
  if ((subcommand == "sweep" || subcommand == "benchmark") && key == "seed") return "seeds";
  return key;
}

bool is_any_key(const std::string& key) {
  for (const auto& sub : kSubcommands) {
    if (known_keys(sub).count(canonical_key(sub, key))) return true;
  }
  return false;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) bad_field(key, "'" + text + "' is not a number");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) {
    bad_field(key, "'" + text + "' is not a non-negative integer");
  }
  return v;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
  return static_cast<std::size_t>(parse_u64(key, text));
}

const std::string& get(const Settings& s, const std::string& key) { return s.at(key).value; }

double real_of(const Settings& s, const std::string& key) { return parse_real(key, get(s, key)); }
std::size_t size_of(const Settings& s, const std::string& key) {
  return parse_size(key, get(s, key));
}

StepRule step_rule_from(const Settings& s) {
  const std::string& rule = get(s, "step_rule");
  if (rule == "backtracking") {
    return BacktrackingStep{real_of(s, "eta0"), real_of(s, "gamma"), real_of(s, "alpha")};
  }
  if (rule == "constant") return ConstantStep{real_of(s, "eta")};
  bad_field("step_rule", "expected 'backtracking' or 'constant', got '" + rule + "'");
}

std::optional<std::string> file_reference(const std::string& value) {
  if (value.rfind("file:", 0) == 0) return value.substr(5);
  return std::nullopt;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  return fs::path(p.string() + suffix);
}

fs::path trace_path_for(const fs::path& phi_path) {
  fs::path stem = phi_path;
  stem.replace_extension();
  return with_suffix(stem, ".trace.csv");
}

struct Manifest {
  std::string subcommand;
  std::string started_at = iso_now();
  Settings settings;
  ordered_json inputs = ordered_json::object();
  ordered_json outputs = ordered_json::object();
  ordered_json results = ordered_json::object();
  std::vector<std::string> warnings;

  std::string render(int exit_code, const std::string& message) const {
    ordered_json j;
    j["tool"] = "ssd";
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["exit_code"] = exit_code;
    switch (exit_code) {
      case kExitOk: j["status"] = "ok"; break;
      case kExitConfig: j["status"] = "config_error"; break;
      case kExitDivergence: j["status"] = "numeric_divergence"; break;
      case kExitDiagnostic: j["status"] = "diagnostic_failure"; break;
      default: j["status"] = "error"; break;
    }
    j["message"] = message;
    ordered_json config = ordered_json::object();
    ordered_json sources = ordered_json::object();
    ordered_json defaults = ordered_json::array();
    for (const auto& [key, setting] : settings) {
      config[key] = setting.value;
      sources[key] = to_string(setting.source);
      if (setting.source == Source::kDefault) defaults.push_back(key);
    }
    j["config"] = config;
    j["sources"] = sources;
    j["defaults_applied"] = defaults;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["results"] = results;
    j["warnings"] = warnings;
    j["started_at"] = started_at;
    j["finished_at"] = iso_now();
    return j.dump(2) + "\n";
  }
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNumericDivergence:
    case ErrorCode::kStepSearchFailure:
      return kExitDivergence;
    default:
      return kExitConfig;
  }
}

std::string read_config(const std::string& path) {
  if (path.empty()) return "";
  try {
    return io::read_file(path);
  } catch (const Error& e) {
    bad_field("config", e.what());
  }
}

// --- design -----------------------------------------------------------------

int cmd_design(const Settings& s, const fs::path& out_path, const fs::path& trace_path,
               Manifest& manifest, std::ostream& out) {
  const DesignConfig config = design_config_from(s);
  validate(config);

  DenseMatrix psi_bar;
  const std::string& dict = get(s, "dictionary");
  const std::uint64_t seed = parse_u64("seed", get(s, "seed"));
  if (auto file = file_reference(dict)) {
    psi_bar = io::read_matrix(*file);
    manifest.inputs["dictionary"] = *file;
  } else if (dict == "gaussian") {
    psi_bar = bench::make_gaussian_dictionary(config.n, config.l, derive_seed(seed, "dictionary"));
  } else {
    bad_field("dictionary", "expected 'gaussian' or 'file:PATH'");
  }

  DenseMatrix base;
  const std::string& base_name = get(s, "base");
  if (base_name == "identity") {
    base = make_identity_base(config.n);
  } else if (base_name == "dct") {
    base = make_dct_base(config.n);
  } else if (auto file = file_reference(base_name)) {
    base = io::read_matrix(*file);
    manifest.inputs["base"] = *file;
  } else {
    bad_field("base", "expected 'identity', 'dct' or 'file:PATH'");
  }

  const std::string& target = get(s, "target");
  DesignResult r = [&] {
    if (target == "projected") return design(psi_bar, base, config);
    if (target == "identity") return design_identity_target(psi_bar, base, config);
    bad_field("target", "expected 'projected' or 'identity'");
  }();

  // Signals are sensed with Phi A; for the identity base that is Phi itself.
  const DenseMatrix sensing = effective_sensing_matrix(r.phi, base);
  io::write_matrix(out_path, sensing);
  io::write_file_atomic(trace_path, trace_to_csv(r.trace));

  manifest.outputs["phi"] = out_path.string();
  manifest.outputs["trace"] = trace_path.string();
  manifest.results["iterations"] = r.trace.size();
  manifest.results["termination_reason"] = to_string(r.termination_reason);
  manifest.results["xi"] = r.xi;
  manifest.results["f0"] = r.f0;
  manifest.results["f_final"] = r.trace.empty() ? r.f0 : r.trace.back().f;
  manifest.results["mu_designed"] = mutual_coherence(sensing * psi_bar).mu;
  manifest.results["welch_bound"] = welch_bound(config.m, config.l);

  out << "design: " << r.trace.size() << " iterations (" << to_string(r.termination_reason)
      << "), f = " << io::format_double(r.trace.empty() ? r.f0 : r.trace.back().f) << "\n";
  return kExitOk;
}

// --- diagnose ---------------------------------------------------------------

struct TraceRow {
  std::size_t iter;
  double f, d_phi, d_g, eta;
  long halvings;
};

std::vector<TraceRow> parse_trace(const std::string& text) {
  std::vector<TraceRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != "iter,f,d_phi,d_g,eta,halvings") {
        throw Error(ErrorCode::kParse, "trace line 1: unexpected header '" + line + "'");
      }
      header = true;
      continue;
    }
    const auto fields = split_list(line);
    const std::string where = "trace line " + std::to_string(line_no);
    if (fields.size() != 6) throw Error(ErrorCode::kParse, where + ": expected 6 fields");
    try {
      TraceRow r{};
      r.iter = parse_size("iter", fields[0]);
      r.f = parse_real("f", fields[1]);
      r.d_phi = parse_real("d_phi", fields[2]);
      r.d_g = parse_real("d_g", fields[3]);
      r.eta = parse_real("eta", fields[4]);
      r.halvings = static_cast<long>(parse_u64("halvings", fields[5]));
      if (!std::isfinite(r.f) || !(r.d_phi >= 0.0) || !(r.d_g >= 0.0) || !(r.eta > 0.0) ||
          !std::isfinite(r.eta)) {
        throw Error(ErrorCode::kParse, "value out of range");
      }
      if (!rows.empty() && r.iter != rows.back().iter + 1) {
        throw Error(ErrorCode::kParse, "iterations are not consecutive");
      }
      rows.push_back(r);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    }
  }
  return rows;
}

int cmd_diagnose(const Settings& s, const fs::path& trace_path, const fs::path& out_path,
                 Manifest& manifest, std::ostream& out, std::ostream& err, std::string& message) {
  const double gamma = real_of(s, "gamma");
  const double slack = real_of(s, "slack");
  if (!(gamma >= 0.0 && gamma < 1.0)) bad_field("gamma", "must lie in [0, 1)");
  if (!(slack >= 0.0)) bad_field("slack", "must be >= 0");
  manifest.inputs["trace"] = trace_path.string();

  std::string text;
  try {
    text = io::read_file(trace_path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  const std::vector<TraceRow> rows = parse_trace(text);

  std::ostringstream report;
  int code = kExitOk;
  bool monotone = true;
  bool decrease = true;
  report << "rows " << rows.size() << "\n";
  if (rows.empty()) {
    manifest.warnings.push_back("empty trace; checks hold vacuously");
    err << "warning: empty trace; checks hold vacuously\n";
  }
  // The trace starts after the first step, so both checks compare
  // consecutive rows.
  for (std::size_t i = 1; i < rows.size() && code == kExitOk; ++i) {
    const TraceRow& prev = rows[i - 1];
    const TraceRow& cur = rows[i];
    if (cur.f > prev.f + slack) {
      code = kExitDiagnostic;
      monotone = false;
      message = "iteration " + std::to_string(cur.iter) + ": f increased from " +
                io::format_double(prev.f) + " to " + io::format_double(cur.f);
    } else if (prev.f - cur.f < gamma / (2.0 * cur.eta) * cur.d_phi * cur.d_phi - slack) {
      code = kExitDiagnostic;
      decrease = false;
      message = "iteration " + std::to_string(cur.iter) + ": sufficient decrease violated";
    }
    if (code != kExitOk) manifest.results["first_violation"] = cur.iter;
  }
  report << "monotone_f " << (monotone ? "ok" : "FAIL") << "\n";
  report << "sufficient_decrease " << (decrease ? "ok" : "FAIL") << "\n";
  if (!rows.empty()) {
    report << "final_surrogate " << io::format_double(rows.back().d_phi) << "\n";
    manifest.results["final_surrogate"] = rows.back().d_phi;
  }
  if (code != kExitOk) report << "violation " << message << "\n";
  manifest.results["rows"] = rows.size();
  manifest.results["passed"] = code == kExitOk;

  out << report.str();
  if (!out_path.empty()) {
    io::write_file_atomic(out_path, report.str());
    manifest.outputs["report"] = out_path.string();
  }
  return code;
}

// --- benchmark / sweep -------------------------------------------------------

bench::SweepConfig sweep_config_from(const Settings& s, Manifest& manifest) {
  bench::SweepConfig c;
  c.m = size_of(s, "m");
  c.n = size_of(s, "n");
  c.l = size_of(s, "l");
  c.k = size_of(s, "k");
  c.j = size_of(s, "j");
  c.snr_db = real_of(s, "snr");
  c.lambda = real_of(s, "lambda");
  c.kappa = size_of(s, "kappa");
  c.max_iters = size_of(s, "max_iters");
  c.step_rule = step_rule_from(s);
  c.tol_phi = real_of(s, "tol_phi");
  c.tol_obj = real_of(s, "tol_obj");
  c.threads = size_of(s, "threads");
  if (c.threads == 0) bad_field("threads", "must be >= 1");
  const std::size_t bits = size_of(s, "psnr_bits");
  if (bits < 1 || bits > 62) bad_field("psnr_bits", "must lie in [1, 62]");
  c.psnr_bits = static_cast<int>(bits);
  c.systems.clear();
  for (const auto& name : split_list(get(s, "systems"))) {
    if (auto file = file_reference(name)) {
      c.external[name] = io::read_matrix(*file);
      manifest.inputs[name] = *file;
    } else if (!bench::is_builtin_system(name)) {
      bad_field("systems", "unknown system '" + name + "'");
    }
    c.systems.push_back(name);
  }
  c.seeds.clear();
  for (const auto& seed : split_list(get(s, "seeds"))) c.seeds.push_back(parse_u64("seeds", seed));
  bench::validate(c);
  return c;
}

int cmd_experiment(const std::string& subcommand, const Settings& s, const fs::path& out_path,
                   Manifest& manifest, std::ostream& out) {
  const bench::SweepConfig config = sweep_config_from(s, manifest);
  bench::SweepAxis axis = bench::SweepAxis::kSnr;
  std::vector<double> values = {config.snr_db};
  if (subcommand == "sweep") {
    const auto parsed = bench::parse_axis(get(s, "axis"));
    if (!parsed) bad_field("axis", "expected one of snr, m, k, kappa, lambda");
    axis = *parsed;
    values.clear();
    for (const auto& v : split_list(get(s, "values"))) values.push_back(parse_real("values", v));
    if (values.empty()) bad_field("values", "at least one value is required");
  }
  const bench::ExperimentReport report = bench::sweep(config, axis, values);
  io::write_file_atomic(out_path, bench::to_csv(report));

  manifest.outputs["report"] = out_path.string();
  manifest.results["rows"] = report.rows.size();
  manifest.results["experiment"] = report.config;
  std::size_t failures = 0;
  for (const auto& row : report.rows) failures += row.failures;
  manifest.results["recovery_failures"] = failures;
  out << subcommand << ": " << report.rows.size() << " rows written to " << out_path.string()
      << "\n";
  return kExitOk;
}

fs::path default_out(const std::string& subcommand) {
  if (subcommand == "design") return "phi.csv";
  if (subcommand == "diagnose") return "";
  return "report.csv";
}

}  // namespace

const char* to_string(Source source) {
  switch (source) {
    case Source::kDefault: return "default";
    case Source::kConfig: return "config";
    case Source::kEnv: return "env";
    case Source::kCommandLine: return "command_line";
  }
  return "unknown";
}

const std::map<std::string, std::string>& known_keys(const std::string& subcommand) {
  if (subcommand == "design") return kDesignKeys;
  if (subcommand == "diagnose") return kDiagnoseKeys;
  if (subcommand == "benchmark") return kBenchmarkKeys;
  if (subcommand == "sweep") return kSweepKeys;
  throw Error(ErrorCode::kInvalidParameter, "subcommand: unknown '" + subcommand + "'");
}

Settings resolve_settings(const std::string& subcommand, const std::string& config_text,
                          const std::map<std::string, std::string>& env,
                          const std::map<std::string, std::string>& overrides) {
  const auto& keys = known_keys(subcommand);
  Settings out;
  for (const auto& [key, value] : keys) out[key] = Setting{value, Source::kDefault};

  if (!trim(config_text).empty()) {
    boost::property_tree::ptree tree;
    std::istringstream in(config_text);
    try {
      boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
    }
    auto apply = [&](const std::string& raw_key, const std::string& raw_value, bool strict) {
      const std::string key = canonical_key(subcommand, normalize_key(raw_key));
      if (!keys.count(key)) {
        if (strict || !is_any_key(key)) bad_field(key, "unknown setting for " + subcommand);
        return;
      }
      out[key] = Setting{clean_value(raw_value), Source::kConfig};
    };
    // Top-level keys first so the subcommand's own section wins.
    for (const auto& [name, node] : tree) {
      if (node.empty()) apply(name, node.data(), false);
    }
    for (const auto& [name, node] : tree) {
      if (node.empty() || normalize_key(name) != subcommand) continue;
      for (const auto& [key, leaf] : node) apply(key, leaf.data(), true);
    }
  }

  for (const auto& [name, value] : env) {
    if (name.rfind("SSD_", 0) != 0) continue;
    const std::string key = canonical_key(subcommand, normalize_key(name.substr(4)));
    if (keys.count(key)) out[key] = Setting{clean_value(value), Source::kEnv};
  }
  for (const auto& [raw_key, value] : overrides) {
    const std::string key = canonical_key(subcommand, normalize_key(raw_key));
    if (!keys.count(key)) bad_field(key, "unknown setting for " + subcommand);
    out[key] = Setting{clean_value(value), Source::kCommandLine};
  }
  return out;
}

DesignConfig design_config_from(const Settings& s) {
  DesignConfig c;
  c.m = size_of(s, "m");
  c.n = size_of(s, "n");
  c.l = size_of(s, "l");
  c.kappa = size_of(s, "kappa");
  const std::string& xi = get(s, "xi");
  c.xi = xi == "welch" ? XiChoice::welch() : XiChoice::value(parse_real("xi", xi));
  c.lambda = real_of(s, "lambda");
  c.max_iters = size_of(s, "max_iters");
  c.step_rule = step_rule_from(s);
  c.tol_phi = real_of(s, "tol_phi");
  c.tol_obj = real_of(s, "tol_obj");
  c.tol_obj_patience = size_of(s, "tol_obj_patience");
  // Same stream as the experiment driver uses for its designed systems.
  c.seed = derive_seed(parse_u64("seed", get(s, "seed")), "design");
  return c;
}

std::string trace_to_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "iter,f,d_phi,d_g,eta,halvings\n";
  for (const auto& r : trace) {
    out += std::to_string(r.iter) + ',' + io::format_double(r.f) + ',' +
           io::format_double(r.d_phi) + ',' + io::format_double(r.d_g) + ',' +
           io::format_double(r.eta) + ',' + std::to_string(r.halvings) + '\n';
  }
  return out;
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry = *e;
    const auto eq = entry.find('=');
    if (eq == std::string::npos || entry.rfind("SSD_", 0) != 0) continue;
    env[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return env;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env) {
  const auto sub_it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
  });

  // Pull `--key value` overrides out before CLI11 sees the rest.
  std::vector<std::string> rest;
  std::map<std::string, std::string> overrides;
  std::string override_error;
  const std::string subcommand = sub_it == args.end() ? "" : *sub_it;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    const bool after_sub = sub_it != args.end() && i > static_cast<std::size_t>(sub_it - args.begin());
    if (!after_sub || a.rfind("--", 0) != 0 || a.size() <= 2) {
      rest.push_back(a);
      continue;
    }
    std::string name = a.substr(2);
    std::optional<std::string> value;
    if (const auto eq = name.find('='); eq != std::string::npos) {
      value = name.substr(eq + 1);
      name.resize(eq);
    }
    const std::string key = canonical_key(subcommand, normalize_key(name));
    if (!known_keys(subcommand).count(key)) {
      rest.push_back(a);
      continue;
    }
    if (!value) {
      if (i + 1 >= args.size()) {
        override_error = key + ": missing value";
        break;
      }
      value = args[++i];
    }
    overrides[key] = *value;
  }

  CLI::App app{"Sparse sensing matrix design and benchmarking", "ssd"};
  app.require_subcommand(1);
  std::string config_path, out_opt, trace_opt, manifest_opt, diag_trace;
  std::string seed_help, threads_help;
  for (const auto& name : kSubcommands) {
    CLI::App* sc = app.add_subcommand(name, "");
    sc->add_option("--config", config_path, "INI/TOML-style config file");
    sc->add_option("--out", out_opt, "Primary output path");
    sc->add_option("--manifest", manifest_opt, "Manifest path (default: <out>.manifest.json)");
    if (name != "diagnose") {
      sc->add_option("--seed", seed_help, "Base seed (also a config key)");
      sc->add_option("--threads", threads_help, "Worker threads (also a config key)");
    }
    if (name == "design") sc->add_option("--trace", trace_opt, "Trace CSV path");
    if (name == "diagnose") {
      sc->add_option("trace,--trace", diag_trace, "Trace CSV from design");
    }
    sc->footer("Any setting can also be given as --key value or SSD_KEY=value.");
  }
  app.get_subcommand("design")->description("Design a sparse sensing matrix");
  app.get_subcommand("diagnose")->description("Check a design trace for monotonicity and sufficient decrease");
  app.get_subcommand("benchmark")->description("Compare sensing systems on one synthetic ensemble");
  app.get_subcommand("sweep")->description("Sweep one parameter and report MSE per system");

  Manifest manifest;
  manifest.subcommand = subcommand;
  fs::path out_path = default_out(subcommand);
  fs::path manifest_path;
  fs::path trace_path;
  int code = kExitOk;
  std::string message;
  if (!subcommand.empty()) manifest.settings = resolve_settings(subcommand, "", {}, {});

  try {
    try {
      std::vector<std::string> reversed(rest.rbegin(), rest.rend());
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      app.exit(e, out, err);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      throw Error(ErrorCode::kParse, e.what());
    }
    if (!override_error.empty()) throw Error(ErrorCode::kInvalidParameter, override_error);

    if (!out_opt.empty()) out_path = out_opt;
    if (subcommand == "design") trace_path = trace_opt.empty() ? trace_path_for(out_path) : fs::path(trace_opt);
    if (subcommand == "diagnose") {
      if (diag_trace.empty()) throw Error(ErrorCode::kInvalidParameter, "trace: a trace path is required");
      trace_path = diag_trace;
    }
    if (!config_path.empty()) manifest.inputs["config"] = config_path;

    manifest.settings = resolve_settings(subcommand, read_config(config_path), env, overrides);

    if (subcommand == "design") {
      code = cmd_design(manifest.settings, out_path, trace_path, manifest, out);
    } else if (subcommand == "diagnose") {
      code = cmd_diagnose(manifest.settings, trace_path, out_path, manifest, out, err, message);
    } else {
      code = cmd_experiment(subcommand, manifest.settings, out_path, manifest, out);
    }
  } catch (const Error& e) {
    code = exit_code_for(e.code());
    message = e.what();
    if (e.index()) message += " (iteration " + std::to_string(*e.index()) + ")";
  }
  if (code != kExitOk) err << "error: " << message << "\n";

  if (!subcommand.empty()) {
    if (!manifest_opt.empty()) {
      manifest_path = manifest_opt;
    } else if (!out_path.empty()) {
      manifest_path = with_suffix(out_path, ".manifest.json");
    } else if (!trace_path.empty()) {
      manifest_path = with_suffix(trace_path, ".diagnose.manifest.json");
    }
    if (!manifest_path.empty()) {
      try {
        io::write_file_atomic(manifest_path, manifest.render(code, message));
      } catch (const Error& e) {
        err << "error: could not write manifest: " << e.what() << "\n";
        if (code == kExitOk) code = kExitConfig;
      }
    }
  }
  return code;
}

}  // namespace ssd::cli
