#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "entlab/config.hpp"

namespace entlab {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw config_error(where + ": " + what);
}

double to_double(const std::string& where, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(where, "expected a number, got '" + v + "'");
  }
}

long long to_ll(const std::string& where, const std::string& v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    fail(where, "expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& where, const std::string& v) {
  const long long ll = to_ll(where, v);
  if (ll < -(1LL << 31) || ll >= (1LL << 31))
    fail(where, "integer out of range: '" + v + "'");
  return static_cast<int>(ll);
}

std::uint64_t to_u64(const std::string& where, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    fail(where, "expected an unsigned integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& where, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(where, "expected a boolean, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& where,
                               const std::string& v) {
  std::vector<double> out;
  for (const auto& piece : split(v, ','))
    if (!piece.empty()) out.push_back(to_double(where, piece));
  if (out.empty()) fail(where, "expected a non-empty comma-separated list");
  return out;
}

std::vector<int> to_ints(const std::string& where, const std::string& v) {
  std::vector<int> out;
  for (const auto& piece : split(v, ','))
    if (!piece.empty()) out.push_back(to_int(where, piece));
  if (out.empty()) fail(where, "expected a non-empty comma-separated list");
  return out;
}

family to_family(const std::string& where, const std::string& v) {
  try {
    return family_from_name(v);
  } catch (const domain_error&) {
    fail(where, "unknown family '" + v + "' (expected BE, PE, EE, or SE)");
  }
}

std::vector<family> to_families(const std::string& where,
                                const std::string& v) {
  std::vector<family> out;
  for (const auto& piece : split(v, ','))
    if (!piece.empty()) out.push_back(to_family(where, piece));
  if (out.empty()) fail(where, "expected a non-empty comma-separated list");
  return out;
}

int to_log_base(const std::string& where, const std::string& v) {
  if (v == "e" || v == "natural") return 0;
  if (v == "2") return 2;
  fail(where, "log_base must be 'e' or '2', got '" + v + "'");
}

// One key = value assignment routed to its run_config field.  `where` is
// "file:line (section.key)" for text configs, "file (section.key)" for JSON.
void apply(run_config& cfg, const std::string& section, const std::string& key,
           const std::string& value, const std::string& where) {
  auto unknown_key = [&] { fail(where, "unknown key '" + key + "'"); };

  if (section == "run") {
    if (key == "experiment") {
      cfg.kind = experiment_from_name(value);
      cfg.kind_explicit = true;
    }
    else if (key == "output") cfg.output_dir = value;
    else if (key == "seed") cfg.seed = to_u64(where, value);
    else if (key == "workers") cfg.workers = to_int(where, value);
    else if (key == "log_base") cfg.log_base = to_log_base(where, value);
    else if (key == "dump_samples") cfg.dump_samples = to_bool(where, value);
    else unknown_key();
  } else if (section == "ensemble") {
    if (key == "families") {
      const auto fams = to_families(where, value);
      cfg.sweep.families = fams;
      cfg.cut.families = fams;
      if (fams.size() == 1) {
        cfg.fitd.fam = fams[0];
        cfg.fss.fam = fams[0];
      }
    } else if (key == "family") {
      const family f = to_family(where, value);
      cfg.fitd.fam = f;
      cfg.fss.fam = f;
      cfg.sweep.families = {f};
      cfg.cut.families = {f};
    } else if (key == "gamma") {
      const double g = to_double(where, value);
      cfg.sweep.gamma = g;
      cfg.fitd.gamma = g;
      cfg.fss.gamma = g;
      cfg.cut.gamma = g;
      cfg.theory.gamma = g;
    } else if (key == "se_hamming_radius") {
      const int r = to_int(where, value);
      cfg.sweep.se_hamming_radius = r;
      cfg.fitd.se_hamming_radius = r;
      cfg.cut.se_hamming_radius = r;
    } else if (key == "se_ray") {
      const double r = to_double(where, value);
      cfg.sweep.se_ray = r;
      cfg.fitd.se_ray = r;
      cfg.cut.se_ray = r;
    } else if (key == "ee_squared") {
      const bool b = to_bool(where, value);
      cfg.sweep.ee_squared = b;
      cfg.fitd.ee_squared = b;
      cfg.cut.ee_squared = b;
    } else if (key == "mu") {
      cfg.explicit_mu = to_double(where, value);
    } else if (key == "w") {
      cfg.explicit_w = to_double(where, value);
    } else if (key == "w_s") {
      cfg.explicit_w_s = to_double(where, value);
    } else {
      unknown_key();
    }
  } else if (section == "sweep") {
    if (key == "l_a") cfg.sweep.l_a = to_int(where, value);
    else if (key == "l_b") cfg.sweep.l_b = to_int(where, value);
    else if (key == "samples") cfg.sweep.samples = to_ll(where, value);
    else if (key == "probe_samples") cfg.sweep.probe_samples = to_ll(where, value);
    else if (key == "ent_lo") cfg.sweep.ent_lo = to_double(where, value);
    else if (key == "ent_hi") cfg.sweep.ent_hi = to_double(where, value);
    else if (key == "lambda_grid") cfg.sweep.lambda_grid = to_doubles(where, value);
    else unknown_key();
  } else if (section == "fitd") {
    if (key == "l_a_min") cfg.fitd.l_a_min = to_int(where, value);
    else if (key == "l_a_max") cfg.fitd.l_a_max = to_int(where, value);
    else if (key == "samples") cfg.fitd.samples = to_ll(where, value);
    else unknown_key();
  } else if (section == "fss") {
    if (key == "c") cfg.fss.c = to_double(where, value);
    else if (key == "l_total") cfg.fss.l_total = to_ints(where, value);
    else if (key == "alpha_lo") cfg.fss.alpha_lo = to_double(where, value);
    else if (key == "alpha_hi") cfg.fss.alpha_hi = to_double(where, value);
    else if (key == "alpha_step") cfg.fss.alpha_step = to_double(where, value);
    else if (key == "samples") cfg.fss.samples = to_ll(where, value);
    else if (key == "bootstrap") cfg.fss.bootstrap = to_int(where, value);
    else unknown_key();
  } else if (section == "cutscan") {
    if (key == "l_total") cfg.cut.l_total = to_int(where, value);
    else if (key == "lambda_targets") cfg.cut.lambda_targets = to_doubles(where, value);
    else if (key == "samples") cfg.cut.samples = to_ll(where, value);
    else unknown_key();
  } else if (section == "theory") {
    if (key == "l_a") cfg.theory.l_a = to_int(where, value);
    else if (key == "l_b") cfg.theory.l_b = to_int(where, value);
    else if (key == "gamma") cfg.theory.gamma = to_double(where, value);
    else if (key == "beta") cfg.theory.beta = to_double(where, value);
    else if (key == "d1_a") cfg.theory.d1.a = to_double(where, value);
    else if (key == "d1_b") cfg.theory.d1.b = to_double(where, value);
    else if (key == "d2_a") cfg.theory.d2.a = to_double(where, value);
    else if (key == "d2_b") cfg.theory.d2.b = to_double(where, value);
    else if (key == "tau1") cfg.theory.tau1 = to_double(where, value);
    else if (key == "tau2") cfg.theory.tau2 = to_double(where, value);
    else if (key == "r0_infinity") cfg.theory.r0_infinity = to_double(where, value);
    else if (key == "q_infinity") cfg.theory.q_infinity = to_double(where, value);
    else if (key == "calib_samples") cfg.theory.calib_samples = to_ll(where, value);
    else if (key == "lambda_lo") cfg.theory.lambda_lo = to_double(where, value);
    else if (key == "lambda_hi") cfg.theory.lambda_hi = to_double(where, value);
    else if (key == "n_points") cfg.theory.n_points = to_int(where, value);
    else if (key == "eq16_variant") cfg.theory.eq16_variant = to_bool(where, value);
    else unknown_key();
  } else if (section == "oracle") {
    if (key == "trials") cfg.oracle.trials = to_ll(where, value);
    else if (key == "tol") cfg.oracle.tol = to_double(where, value);
    else unknown_key();
  } else {
    fail(where, "unknown section '" + section + "'");
  }
}

void note_section(run_config& cfg, const std::string& section) {
  if (std::find(cfg.sections_seen.begin(), cfg.sections_seen.end(), section) ==
      cfg.sections_seen.end())
    cfg.sections_seen.push_back(section);
}

run_config parse_text(const std::string& text, const std::string& name) {
  run_config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const std::string where = name + ":" + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']') fail(where, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) fail(where, "empty section name");
      note_section(cfg, section);
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) fail(where, "expected 'key = value'");
    if (section.empty()) fail(where, "assignment before any [section]");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    apply(cfg, section, key, value, where + " (" + section + "." + key + ")");
  }
  return cfg;
}

// JSON carries the same schema as an object of section objects; scalars and
// arrays are rendered to the text forms and routed through `apply`.
std::string json_scalar(const std::string& where, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  fail(where, "expected a scalar value");
}

run_config parse_json(const std::string& text, const std::string& name) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(name + ": " + e.what());
  }
  if (!root.is_object()) fail(name, "top level must be an object of sections");

  run_config cfg;
  for (const auto& [section, body] : root.items()) {
    if (!body.is_object())
      fail(name + " (" + section + ")", "section must be an object");
    note_section(cfg, section);
    for (const auto& [key, value] : body.items()) {
      const std::string where = name + " (" + section + "." + key + ")";
      std::string rendered;
      if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (i) rendered += ",";
          rendered += json_scalar(where, value[i]);
        }
      } else {
        rendered = json_scalar(where, value);
      }
      apply(cfg, section, key, rendered, where);
    }
  }
  return cfg;
}

}  // namespace

const char* experiment_name(experiment_kind k) {
  switch (k) {
    case experiment_kind::sweep: return "sweep";
    case experiment_kind::fit_d: return "fit-d";
    case experiment_kind::fss: return "fss";
    case experiment_kind::cutscan: return "cutscan";
    case experiment_kind::theory: return "theory";
    case experiment_kind::oracle_check: return "oracle-check";
  }
  throw domain_error("experiment_name: bad enum value");
}

experiment_kind experiment_from_name(const std::string& name) {
  if (name == "sweep") return experiment_kind::sweep;
  if (name == "fit-d") return experiment_kind::fit_d;
  if (name == "fss") return experiment_kind::fss;
  if (name == "cutscan") return experiment_kind::cutscan;
  if (name == "theory") return experiment_kind::theory;
  if (name == "oracle-check") return experiment_kind::oracle_check;
  throw config_error("unknown experiment '" + name + "'");
}

void propagate(run_config& cfg) {
  cfg.sweep.seed = cfg.seed;
  cfg.fitd.seed = cfg.seed;
  cfg.fss.seed = cfg.seed;
  cfg.cut.seed = cfg.seed;
  cfg.sweep.workers = cfg.workers;
  cfg.fitd.workers = cfg.workers;
  cfg.fss.workers = cfg.workers;
  cfg.cut.workers = cfg.workers;
}

run_config parse_config(const std::string& text, const std::string& name) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
    ++i;
  run_config cfg = (i < text.size() && text[i] == '{') ? parse_json(text, name)
                                                       : parse_text(text, name);
  cfg.source_path = name;
  cfg.source_text = text;
  propagate(cfg);
  return cfg;
}

run_config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

bool validation_report::ok() const {
  for (const auto& d : items)
    if (d.severity == diagnostic::level::error) return false;
  return true;
}

std::vector<std::string> validation_report::errors() const {
  std::vector<std::string> out;
  for (const auto& d : items)
    if (d.severity == diagnostic::level::error)
      out.push_back(d.field + ": " + d.message);
  return out;
}

std::vector<std::string> validation_report::warnings() const {
  std::vector<std::string> out;
  for (const auto& d : items)
    if (d.severity == diagnostic::level::warning)
      out.push_back(d.field + ": " + d.message);
  return out;
}

namespace {

void add(validation_report& rep, diagnostic::level sev, std::string field,
         std::string message) {
  rep.items.push_back({sev, std::move(field), std::move(message)});
}

void require_sorted_positive(validation_report& rep, const std::string& field,
                             const std::vector<double>& grid) {
  if (grid.empty()) {
    add(rep, diagnostic::level::error, field, "grid must be nonempty");
    return;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0) || !std::isfinite(grid[i])) {
      add(rep, diagnostic::level::error, field,
          "grid values must be positive and finite");
      return;
    }
    if (i && grid[i] <= grid[i - 1]) {
      add(rep, diagnostic::level::error, field,
          "grid must be strictly increasing");
      return;
    }
  }
}

void require_section(validation_report& rep, const run_config& cfg,
                     const std::string& section) {
  if (std::find(cfg.sections_seen.begin(), cfg.sections_seen.end(), section) ==
      cfg.sections_seen.end())
    add(rep, diagnostic::level::error, section,
        "experiment '" + std::string(experiment_name(cfg.kind)) +
            "' needs a [" + section + "] section");
}

// Scans a concrete profile for terms where 1 - 2 gamma h vanishes (Lambda is
// undefined there); lists the first few offending cells.
void scan_singular(validation_report& rep, const run_config& cfg, family f,
                   int l_a, int l_b, double gamma) {
  if (l_a < 1 || l_b < 1 || l_a + l_b > 24 || !(gamma > 0)) return;
  ensemble_spec spec;
  spec.fam = f;
  spec.l_a = l_a;
  spec.l_b = l_b;
  spec.gamma = gamma;
  if (f == family::SE) {
    if (std::isnan(cfg.explicit_w)) return;
    spec.w = cfg.explicit_w;
    spec.w_s = std::isnan(cfg.explicit_w_s) ? cfg.explicit_w : cfg.explicit_w_s;
  } else {
    if (std::isnan(cfg.explicit_mu)) return;
    spec.mu = cfg.explicit_mu;
  }
  if (f == family::SE) spec.hamming_radius = cfg.sweep.se_hamming_radius;
  spec.ee_squared = cfg.sweep.ee_squared;

  profile p;
  try {
    p = variance_profile(spec);
  } catch (const error&) {
    return;  // bad explicit parameters are reported by their own checks
  }
  std::string cells;
  int hits = 0;
  for (int k = 1; k <= p.n_a; ++k)
    for (int l = 1; l <= p.n_b; ++l)
      if (std::abs(1.0 - 2.0 * gamma * p.at(k, l)) < 1e-12) {
        ++hits;
        if (hits <= 5)
          cells += (cells.empty() ? "" : ", ") + std::string("(") +
                   std::to_string(k) + "," + std::to_string(l) + ")";
      }
  if (hits)
    add(rep, diagnostic::level::warning, "ensemble",
        std::string(family_name(f)) + " profile has " + std::to_string(hits) +
            " singular term(s) where 1 - 2 gamma h = 0, first at " + cells +
            "; Lambda is undefined at these parameters");
}

}  // namespace

validation_report validate(const run_config& cfg) {
  validation_report rep;
  const auto err = diagnostic::level::error;
  const auto warn = diagnostic::level::warning;

  if (cfg.output_dir.empty())
    add(rep, err, "run.output", "output directory must be nonempty");
  if (cfg.workers < 0)
    add(rep, err, "run.workers", "workers must be >= 0");
  if (cfg.log_base != 0 && cfg.log_base != 2)
    add(rep, err, "run.log_base", "log_base must be 'e' or '2'");

  switch (cfg.kind) {
    case experiment_kind::sweep: {
      require_section(rep, cfg, "ensemble");
      require_section(rep, cfg, "sweep");
      const auto& s = cfg.sweep;
      if (s.families.empty())
        add(rep, err, "ensemble.families", "at least one family required");
      if (s.samples < 2)
        add(rep, err, "sweep.samples", "samples must be >= 2");
      if (s.probe_samples < 2)
        add(rep, err, "sweep.probe_samples", "probe_samples must be >= 2");
      if (s.l_a < 1 || s.l_b < 1)
        add(rep, err, "sweep.l_a", "subsystem exponents must be >= 1");
      else if (s.l_a > s.l_b)
        add(rep, err, "sweep.l_a", "convention requires l_a <= l_b");
      else if (s.l_a + s.l_b > 24)
        add(rep, warn, "sweep.l_a",
            "state matrices beyond 2^24 entries will be very slow");
      if (!(s.gamma > 0))
        add(rep, err, "ensemble.gamma", "gamma must be positive");
      if (!s.lambda_grid.empty())
        require_sorted_positive(rep, "sweep.lambda_grid", s.lambda_grid);
      else if (!(s.ent_lo > 0) || !(s.ent_hi > s.ent_lo))
        add(rep, err, "sweep.ent_lo",
            "need 0 < ent_lo < ent_hi for the automatic grid");
      for (const family f : s.families)
        scan_singular(rep, cfg, f, s.l_a, s.l_b, s.gamma);
      break;
    }
    case experiment_kind::fit_d: {
      require_section(rep, cfg, "ensemble");
      require_section(rep, cfg, "fitd");
      const auto& d = cfg.fitd;
      if (d.samples < 2)
        add(rep, err, "fitd.samples", "samples must be >= 2");
      if (d.l_a_min < 2 || d.l_a_max < d.l_a_min)
        add(rep, err, "fitd.l_a_min", "need 2 <= l_a_min <= l_a_max");
      if (d.l_a_max - d.l_a_min < 2)
        add(rep, warn, "fitd.l_a_max",
            "fewer than three sizes make the exponent fit fragile");
      if (!(d.gamma > 0))
        add(rep, err, "ensemble.gamma", "gamma must be positive");
      scan_singular(rep, cfg, d.fam, d.l_a_max, d.l_a_max, d.gamma);
      break;
    }
    case experiment_kind::fss: {
      require_section(rep, cfg, "ensemble");
      require_section(rep, cfg, "fss");
      const auto& f = cfg.fss;
      if (f.fam == family::SE)
        add(rep, err, "ensemble.family",
            "criticality runs support BE, PE, EE only");
      if (f.samples < 2)
        add(rep, err, "fss.samples", "samples must be >= 2");
      if (!(f.c > 0))
        add(rep, err, "fss.c", "scaling constant c must be positive");
      if (f.l_total.empty())
        add(rep, err, "fss.l_total", "grid must be nonempty");
      for (std::size_t i = 0; i < f.l_total.size(); ++i) {
        if (f.l_total[i] % 2 || f.l_total[i] < 4) {
          add(rep, err, "fss.l_total", "sizes must be even and >= 4");
          break;
        }
        if (i && f.l_total[i] <= f.l_total[i - 1]) {
          add(rep, err, "fss.l_total", "sizes must be strictly increasing");
          break;
        }
      }
      if (f.l_total.size() < 2)
        add(rep, err, "fss.l_total", "need at least two sizes to cross");
      if (!(f.alpha_step > 0) || !(f.alpha_hi > f.alpha_lo))
        add(rep, err, "fss.alpha_lo", "need alpha_lo < alpha_hi, step > 0");
      else if (!(f.alpha_lo > 0.0) || !(f.alpha_hi < 2.0))
        add(rep, err, "fss.alpha_lo", "alpha grid must lie inside (0, 2)");
      if (f.bootstrap < 0)
        add(rep, err, "fss.bootstrap", "bootstrap must be >= 0");
      else if (f.bootstrap > 0 && f.bootstrap < 50)
        add(rep, warn, "fss.bootstrap",
            "fewer than 50 resamples give coarse percentile bands");
      if (!(f.gamma > 0))
        add(rep, err, "ensemble.gamma", "gamma must be positive");
      if (!f.l_total.empty())
        scan_singular(rep, cfg, f.fam, f.l_total.back() / 2,
                      f.l_total.back() / 2, f.gamma);
      break;
    }
    case experiment_kind::cutscan: {
      require_section(rep, cfg, "ensemble");
      require_section(rep, cfg, "cutscan");
      const auto& c = cfg.cut;
      if (c.families.empty())
        add(rep, err, "ensemble.families", "at least one family required");
      if (c.samples < 2)
        add(rep, err, "cutscan.samples", "samples must be >= 2");
      if (c.l_total < 4 || c.l_total > 40)
        add(rep, err, "cutscan.l_total", "l_total must lie in [4, 40]");
      require_sorted_positive(rep, "cutscan.lambda_targets", c.lambda_targets);
      if (!(c.gamma > 0))
        add(rep, err, "ensemble.gamma", "gamma must be positive");
      for (const family f : c.families)
        scan_singular(rep, cfg, f, c.l_total / 2, c.l_total - c.l_total / 2,
                      c.gamma);
      break;
    }
    case experiment_kind::theory: {
      require_section(rep, cfg, "theory");
      const auto& t = cfg.theory;
      if (t.l_a < 1 || t.l_b < t.l_a)
        add(rep, err, "theory.l_a", "need 1 <= l_a <= l_b");
      if (t.l_a < 2)
        add(rep, err, "theory.l_a",
            "bracket laws need l_a >= 2 (log2 N_A > 1)");
      if (!(t.gamma > 0))
        add(rep, err, "theory.gamma", "gamma must be positive");
      if (!(t.beta > 0))
        add(rep, err, "theory.beta", "beta must be positive");
      if (!(t.d1.a > 0) || !(t.d2.a > 0) || t.d1.b < 0 || t.d2.b < 0)
        add(rep, err, "theory.d1_a",
            "size models need positive amplitude and b >= 0");
      if (!(t.lambda_lo > 0) || !(t.lambda_hi > t.lambda_lo))
        add(rep, err, "theory.lambda_lo", "need 0 < lambda_lo < lambda_hi");
      if (t.n_points < 2)
        add(rep, err, "theory.n_points", "need at least two curve points");
      if ((t.r0_infinity == 0 || t.q_infinity == 0) && t.calib_samples < 2)
        add(rep, err, "theory.calib_samples",
            "calibration needs samples >= 2");
      break;
    }
    case experiment_kind::oracle_check: {
      require_section(rep, cfg, "oracle");
      if (cfg.oracle.trials < 1)
        add(rep, err, "oracle.trials", "trials must be >= 1");
      if (!(cfg.oracle.tol > 0))
        add(rep, err, "oracle.tol", "tolerance must be positive");
      break;
    }
  }
  return rep;
}

}  // namespace entlab
