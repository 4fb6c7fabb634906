#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "limitforge/cli.hpp"

namespace limitforge::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view text, const std::string& what) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(what + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> split_array(std::string_view value) {
  value = trim(value);
  std::vector<std::string> items;
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
    items.emplace_back(value);
    return items;
  }
  value = value.substr(1, value.size() - 2);
  while (true) {
    const auto comma = value.find(',');
    const auto item = trim(value.substr(0, comma));
    if (!item.empty()) items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return items;
}

Stream parse_stream(const std::string& s) {
  if (s == "primary" || s == "a" || s == "x") return Stream::Primary;
  if (s == "secondary" || s == "b") return Stream::Secondary;
  if (s == "aux" || s == "A") return Stream::Aux;
  throw ConfigError("unknown target '" + s + "' (primary, secondary, aux)");
}

LawSelector parse_law(std::string_view text) {
  text = trim(text);
  LawSelector law;
  if (text == "catalog") return law;
  if (text == "predict") {
    law.kind = LawSelector::Kind::Predict;
    return law;
  }
  if (text == "second_term") {
    law.kind = LawSelector::Kind::SecondTerm;
    return law;
  }
  if (text == "none") {
    law.kind = LawSelector::Kind::None;
    return law;
  }
  if (text.starts_with("closed(") && text.ends_with(")")) {
    const auto inner = text.substr(7, text.size() - 8);
    std::vector<double> args;
    for (const auto& item : split_array("[" + std::string(inner) + "]")) {
      args.push_back(parse_real(item, "closed law"));
    }
    if (args.size() < 2 || args.size() > 3) {
      throw ConfigError("closed(c, e[, l]) takes 2 or 3 arguments");
    }
    law.kind = LawSelector::Kind::Closed;
    law.closed = {args[0], args[1], args.size() == 3 ? args[2] : 0.0};
    return law;
  }
  throw ConfigError("unknown law '" + std::string(text) +
                    "' (catalog, predict, second_term, none, closed(c,e,l))");
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

FunctionExpr parse_expr(const std::string& key, const std::string& text) {
  try {
    return FunctionExpr::parse(text);
  } catch (const ParseError& e) {
    throw ConfigError(key + " = " + text + ": " + e.what());
  }
}

const std::set<std::string> kKnownKeys{
    "family", "task",   "f",        "g",        "a1",     "b1",       "x1",     "p",
    "q",      "driver", "n_max",    "schedule", "law",    "target",   "stream", "tolerance",
    "output", "audit",  "classify", "expected", "constant", "alpha"};

ExperimentConfig build(const std::string& name, const std::map<std::string, std::string>& kv) {
  ExperimentConfig e;
  e.name = name;
  e.entries = kv;
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto real = [&](const char* key, double fallback) {
    auto v = get(key);
    return v ? parse_real(*v, key) : fallback;
  };
  auto integer = [&](const char* key, int fallback) {
    const double v = real(key, fallback);
    if (v != std::floor(v) || std::fabs(v) > 1e9) throw ConfigError(std::string(key) + " must be an integer");
    return static_cast<int>(v);
  };

  for (const auto& [key, value] : kv) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown key '" + key + "'");
  }

  const auto n_max = get("n_max");
  if (!n_max) throw ConfigError("missing n_max");
  e.n_max = parse_count(*n_max);
  if (auto s = get("schedule")) e.schedule = CheckpointSchedule::parse(*s);
  e.tolerance = real("tolerance", 1e-6);
  if (!(e.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (auto o = get("output")) {
    if (*o == "csv") {
      e.format = OutputFormat::Csv;
    } else if (*o == "json") {
      e.format = OutputFormat::Json;
    } else {
      throw ConfigError("output must be csv or json");
    }
  }
  if (auto a = get("audit")) e.audit = parse_bool(*a);
  if (auto c = get("classify")) e.classify = parse_bool(*c);
  if (auto x = get("expected")) e.expected = parse_real(*x, "expected");
  if (auto l = get("law")) e.law = parse_law(*l);
  auto target = get("target");
  if (!target) target = get("stream");
  if (target) {
    e.targets.clear();
    for (const auto& s : split_array(*target)) e.targets.push_back(parse_stream(s));
    if (e.targets.empty()) throw ConfigError("empty target list");
  }

  const auto task = get("task").value_or("recurrence");
  if (task == "sum_alternating") {
    e.task = TaskKind::SumAlternating;
    const auto f = get("f");
    if (!f) throw ConfigError("sum_alternating needs f");
    e.series_f = parse_expr("f", *f);
    return e;
  }
  if (task == "constant" || task == "constants") {
    e.task = TaskKind::Constant;
    e.constant = get("constant").value_or("gamma");
    if (e.constant != "gamma" && e.constant != "stieltjes") {
      throw ConfigError("constant must be gamma or stieltjes");
    }
    e.alpha = integer("alpha", 0);
    if (e.alpha < 0) throw ConfigError("alpha must be >= 0");
    if (e.constant == "gamma" && e.n_max < 2) throw ConfigError("gamma needs n_max >= 2");
    return e;
  }
  if (task != "recurrence") throw ConfigError("unknown task '" + task + "'");

  const auto family = get("family");
  if (!family) throw ConfigError("missing family");
  if (*family == "first_order_inverse") {
    const auto f = get("f");
    if (!f) throw ConfigError("first_order_inverse needs f");
    FirstOrderInverse s{parse_expr("f", *f), std::nullopt, real("a1", 1.0)};
    if (auto g = get("g")) s.g = parse_expr("g", *g);
    e.spec = s;
  } else if (*family == "cumulative_second_order") {
    e.spec = CumulativeSecondOrder{real("a1", 1.0)};
  } else if (*family == "tauberian") {
    e.spec = TauberianGenerator{integer("p", 1), integer("q", 2)};
  } else if (*family == "coupled") {
    e.spec = Coupled{real("a1", 1.0), real("b1", 1.0)};
  } else if (*family == "quadratic_map") {
    e.spec = QuadraticMap{real("x1", 0.5)};
  } else if (*family == "driven_sqrt") {
    const auto d = get("driver").value_or("constant");
    Driver driver;
    if (d == "constant" || d == "1") {
      driver = Driver::Constant;
    } else if (d == "sin2" || d == "sin^2") {
      driver = Driver::SineSquared;
    } else {
      throw ConfigError("driver must be constant or sin2");
    }
    e.spec = DrivenSqrt{driver, real("a1", 1.0)};
  } else {
    throw ConfigError("unknown family '" + *family + "'");
  }

  try {
    validate(*e.spec);
    e.schedule.points(e.n_max);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(ex.what());
  }
  if (e.law.kind == LawSelector::Kind::Predict &&
      !std::holds_alternative<FirstOrderInverse>(*e.spec)) {
    throw ConfigError("law = predict needs family first_order_inverse");
  }
  if (e.law.kind == LawSelector::Kind::None && !e.classify) {
    throw ConfigError("law = none only makes sense with classify = true");
  }
  if (e.classify && !std::holds_alternative<Coupled>(*e.spec)) {
    throw ConfigError("classify needs family coupled");
  }
  return e;
}

}  // namespace

std::int64_t parse_count(std::string_view text) {
  const double v = parse_real(text, "count");
  if (v < 1 || v != std::floor(v) || v > 9.0e15) {
    throw ConfigError("expected a positive integer, got '" + std::string(trim(text)) + "'");
  }
  return static_cast<std::int64_t>(v);
}

Config parse_config(std::string_view text) {
  Config config;
  std::set<std::string> names;
  std::string current;
  std::map<std::string, std::string> kv;
  std::size_t block_line = 0;
  bool open = false;

  auto flush = [&] {
    if (!open) return;
    try {
      config.experiments.push_back(build(current, kv));
    } catch (const std::exception& e) {
      throw ConfigError("experiment '" + current + "' (line " + std::to_string(block_line) +
                        "): " + e.what());
    }
    kv.clear();
  };

  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      }
      flush();
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (current.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty name");
      if (!names.insert(current).second) {
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate experiment '" +
                          current + "'");
      }
      open = true;
      block_line = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    if (!open) {
      throw ConfigError("line " + std::to_string(line_no) + ": key outside an [experiment] block");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!kv.emplace(key, value).second) {
      throw ConfigError("experiment '" + current + "' line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
  }
  flush();
  if (config.experiments.empty()) throw ConfigError("config defines no experiments");
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_digest(const Config& config) {
  std::vector<const ExperimentConfig*> sorted;
  for (const auto& e : config.experiments) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->name < b->name; });
  std::string canonical;
  for (const auto* e : sorted) {
    canonical += "[" + e->name + "]\n";
    for (const auto& [k, v] : e->entries) canonical += k + "=" + v + "\n";
  }

  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

void apply_overrides(Config& config, const Overrides& o) {
  for (auto& e : config.experiments) {
    if (o.tolerance) {
      e.tolerance = *o.tolerance;
      std::ostringstream ss;
      ss.precision(17);
      ss << *o.tolerance;
      e.entries["tolerance"] = ss.str();
    }
    if (o.format) {
      e.format = *o.format;
      e.entries["output"] = *o.format == OutputFormat::Csv ? "csv" : "json";
    }
    if (o.schedule) {
      e.schedule = *o.schedule;
      e.entries["schedule"] = o.schedule->describe();
    }
    if (o.n_max) {
      e.n_max = *o.n_max;
      e.entries["n_max"] = std::to_string(*o.n_max);
      if (!o.schedule && e.schedule.kind() == CheckpointSchedule::Kind::Explicit) {
        std::vector<std::int64_t> kept;
        for (auto p : e.schedule.explicit_list()) {
          if (p <= e.n_max) kept.push_back(p);
        }
        e.schedule = CheckpointSchedule::explicit_points(kept);
        e.entries["schedule"] = e.schedule.describe();
      }
      if (e.task == TaskKind::Constant && e.constant == "gamma" && e.n_max < 2) {
        throw ConfigError("experiment '" + e.name + "': gamma needs n_max >= 2");
      }
    }
    if (e.spec) {
      try {
        e.schedule.points(e.n_max);
      } catch (const std::exception& ex) {
        throw ConfigError("experiment '" + e.name + "': " + ex.what());
      }
    }
  }
}

}  // namespace limitforge::cli
