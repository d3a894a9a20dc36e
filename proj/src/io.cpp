#include "cgvote/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cgvote {

namespace {

using OrderedJson = nlohmann::ordered_json;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << text;
  if (!out) throw ValidationError("write failed: " + path.string());
}

OrderedJson parse_json(const std::filesystem::path& path) {
  OrderedJson doc = OrderedJson::parse(read_text(path), nullptr, false);
  if (doc.is_discarded()) throw ValidationError("invalid JSON in " + path.string());
  return doc;
}

std::string trim(std::string_view text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
  std::int64_t value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

double parse_double(std::string_view text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("invalid number '" + std::string(text) + "' in " + where);
  }
  return value;
}

std::string format_full(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_4dp(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

void reject_unknown_keys(const OrderedJson& object, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, unused] : object.items()) {
    if (!known.contains(key)) {
      throw ValidationError("unknown key \"" + key + "\" in " + where);
    }
  }
}

Eigen::VectorXd vector_from_json(const OrderedJson& array, const std::string& where) {
  if (!array.is_array()) throw ValidationError(where + " must be an array");
  Eigen::VectorXd out(array.size());
  Eigen::Index i = 0;
  for (const auto& item : array) {
    if (!item.is_number()) throw ValidationError(where + " must contain numbers");
    out[i++] = item.get<double>();
  }
  return out;
}

OrderedJson vector_to_json(const Eigen::VectorXd& values) {
  OrderedJson array = OrderedJson::array();
  for (Eigen::Index i = 0; i < values.size(); ++i) array.push_back(values[i]);
  return array;
}

}  // namespace

PredictionFile read_prediction_csv(const std::filesystem::path& path, int class_count) {
  if (class_count < 2) throw ValidationError("class count must be at least 2");
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open prediction file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty prediction file: " + path.string());
  std::string expected_header = "sample_id,true_label";
  for (int j = 0; j < class_count; ++j) expected_header += ",p_" + std::to_string(j);
  if (trim(line) != expected_header) {
    throw ValidationError(path.string() + ": header must be `" + expected_header + "`");
  }

  PredictionFile file;
  std::vector<std::string> raw_labels;
  std::vector<Eigen::RowVectorXd> rows;
  bool labels_numeric = true;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != class_count + 2) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(class_count + 2) + " fields");
    }
    const auto sample_id = parse_int(fields[0]);
    if (!sample_id) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": bad sample_id");
    }
    if (!file.sample_ids.empty() && *sample_id <= file.sample_ids.back()) {
      throw ValidationError(path.string() + ": sample ids must be strictly ascending (id " +
                            std::to_string(*sample_id) + ")");
    }
    file.sample_ids.push_back(*sample_id);
    raw_labels.push_back(fields[1]);
    if (!parse_int(fields[1])) labels_numeric = false;

    Eigen::RowVectorXd row(class_count);
    for (int j = 0; j < class_count; ++j) {
      row[j] = parse_double(fields[2 + j], path.string() + ":" + std::to_string(line_no));
      if (row[j] < 0.0 || row[j] > 1.0 + 1e-6) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": probability outside [0, 1]");
      }
    }
    const double sum = row.sum();
    if (std::abs(sum - 1.0) > 1e-6) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": probabilities sum to " + format_full(sum) +
                            ", more than 1e-6 away from 1");
    }
    rows.push_back(row / sum);
  }
  if (rows.empty()) throw ValidationError("no data rows in " + path.string());

  if (labels_numeric) {
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      const std::int64_t label = *parse_int(raw_labels[i]);
      if (label < 0 || label >= class_count) {
        throw ValidationError(path.string() + ": true label " + std::to_string(label) +
                              " outside [0, " + std::to_string(class_count) + ") at sample id " +
                              std::to_string(file.sample_ids[i]));
      }
      file.true_labels.push_back(static_cast<int>(label));
    }
  } else {
    // String labels: dense indices come from the sorted unique label set.
    // Every class must be present, otherwise the mapping could not line up
    // with the p_j probability columns.
    auto [encoded, classes] = encode_labels(raw_labels);
    if (static_cast<int>(classes.size()) != class_count) {
      throw ValidationError(path.string() + ": found " + std::to_string(classes.size()) +
                            " distinct labels for " + std::to_string(class_count) + " classes");
    }
    file.true_labels = std::move(encoded);
  }

  file.soft.resize(static_cast<Eigen::Index>(rows.size()), class_count);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    file.soft.row(static_cast<Eigen::Index>(i)) = rows[i];
  }
  return file;
}

void write_prediction_csv(const std::filesystem::path& path, const PredictionFile& file) {
  const int class_count = static_cast<int>(file.soft.cols());
  std::ostringstream out;
  out << "sample_id,true_label";
  for (int j = 0; j < class_count; ++j) out << ",p_" << j;
  out << "\n";
  for (std::size_t i = 0; i < file.sample_ids.size(); ++i) {
    out << file.sample_ids[i] << "," << file.true_labels[i];
    for (int j = 0; j < class_count; ++j) {
      out << "," << format_full(file.soft(static_cast<Eigen::Index>(i), j));
    }
    out << "\n";
  }
  write_text(path, out.str());
}

Manifest read_manifest(const std::filesystem::path& path) {
  const OrderedJson doc = parse_json(path);
  if (!doc.is_object()) throw ValidationError("manifest must be a JSON object");
  Manifest manifest;
  manifest.dataset = doc.value("dataset", path.stem().string());
  if (!doc.contains("classes") || !doc["classes"].is_number_integer()) {
    throw ValidationError("manifest needs an integer \"classes\" field");
  }
  manifest.class_count = doc["classes"].get<int>();
  if (manifest.class_count < 2) throw ValidationError("manifest: classes must be >= 2");
  if (!doc.contains("classifiers") || !doc["classifiers"].is_array()) {
    throw ValidationError("manifest needs a \"classifiers\" array");
  }
  std::set<std::string> seen;
  for (const auto& entry : doc["classifiers"]) {
    ManifestEntry parsed;
    if (!entry.contains("name") || !entry.contains("model_test") ||
        !entry.contains("ensemble_test")) {
      throw ValidationError("each manifest entry needs name, model_test and ensemble_test");
    }
    parsed.name = entry["name"].get<std::string>();
    parsed.model_test = entry["model_test"].get<std::string>();
    parsed.ensemble_test = entry["ensemble_test"].get<std::string>();
    if (!seen.insert(parsed.name).second) {
      throw ValidationError("duplicate classifier name in manifest: " + parsed.name);
    }
    manifest.entries.push_back(std::move(parsed));
  }
  if (manifest.entries.size() < 2) {
    throw ValidationError("manifest needs at least 2 classifiers");
  }
  return manifest;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  OrderedJson doc;
  doc["dataset"] = manifest.dataset;
  doc["classes"] = manifest.class_count;
  doc["classifiers"] = OrderedJson::array();
  for (const ManifestEntry& entry : manifest.entries) {
    OrderedJson item;
    item["name"] = entry.name;
    item["model_test"] = entry.model_test;
    item["ensemble_test"] = entry.ensemble_test;
    doc["classifiers"].push_back(item);
  }
  write_text(path, doc.dump(2) + "\n");
}

namespace {

PredictionSplit load_split(const Manifest& manifest, const std::filesystem::path& dir,
                           bool ensemble, const char* split_name) {
  PredictionSplit split;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const ManifestEntry& entry = manifest.entries[i];
    const std::string& relative = ensemble ? entry.ensemble_test : entry.model_test;
    const std::filesystem::path file_path = dir / relative;
    if (!std::filesystem::exists(file_path)) {
      throw ValidationError("prediction file does not exist: " + file_path.string());
    }
    PredictionFile file = read_prediction_csv(file_path, manifest.class_count);
    if (i == 0) {
      split.sample_ids = std::move(file.sample_ids);
      split.true_labels = std::move(file.true_labels);
    } else {
      if (file.sample_ids.size() != split.sample_ids.size()) {
        throw ValidationError(std::string(split_name) + ": " + entry.name + " has " +
                              std::to_string(file.sample_ids.size()) + " samples, expected " +
                              std::to_string(split.sample_ids.size()));
      }
      for (std::size_t row = 0; row < split.sample_ids.size(); ++row) {
        if (file.sample_ids[row] != split.sample_ids[row]) {
          throw ValidationError(std::string(split_name) + ": sample id mismatch at id " +
                                std::to_string(split.sample_ids[row]) + " (" + entry.name +
                                " has " + std::to_string(file.sample_ids[row]) + ")");
        }
        if (file.true_labels[row] != split.true_labels[row]) {
          throw ValidationError(std::string(split_name) + ": true-label mismatch at sample id " +
                                std::to_string(split.sample_ids[row]) + " (" + entry.name + ")");
        }
      }
    }
    split.soft.push_back(std::move(file.soft));
  }
  return split;
}

}  // namespace

PredictionBundle load_bundle(const Manifest& manifest, const std::filesystem::path& manifest_dir) {
  PredictionBundle bundle;
  bundle.dataset = manifest.dataset;
  bundle.class_count = manifest.class_count;
  for (const ManifestEntry& entry : manifest.entries) {
    bundle.classifier_names.push_back(entry.name);
  }
  bundle.model_test = load_split(manifest, manifest_dir, false, "model_test");
  bundle.ensemble_test = load_split(manifest, manifest_dir, true, "ensemble_test");
  bundle.validate();
  return bundle;
}

EnsembleConfig read_config(const std::filesystem::path& path) {
  const OrderedJson doc = parse_json(path);
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"vikor_v", "bankruptcy_fraction", "metrics", "stage2_metric_weights",
                       "value_concepts", "selection_policy", "tie_rule", "split_ratios", "seed",
                       "parallel"},
                      "config " + path.string());

  EnsembleConfig cfg;
  if (doc.contains("vikor_v")) cfg.vikor_v = doc["vikor_v"].get<double>();
  if (doc.contains("bankruptcy_fraction")) {
    cfg.bankruptcy_fraction = doc["bankruptcy_fraction"].get<double>();
  }
  if (doc.contains("metrics")) {
    cfg.metrics.clear();
    for (const auto& item : doc["metrics"]) {
      cfg.metrics.push_back(metric_from_string(item.get<std::string>()));
    }
  }
  if (doc.contains("stage2_metric_weights")) {
    cfg.stage2_metric_weights = vector_from_json(doc["stage2_metric_weights"],
                                                 "stage2_metric_weights");
  }
  if (doc.contains("value_concepts")) {
    cfg.concepts.clear();
    for (const auto& item : doc["value_concepts"]) {
      const auto concept_tag = concept_from_string(item.get<std::string>());
      if (!concept_tag) {
        throw ValidationError("unknown value concept: " + item.get<std::string>());
      }
      cfg.concepts.push_back(*concept_tag);
    }
  }
  if (doc.contains("selection_policy")) {
    cfg.selection_policy = doc["selection_policy"].get<std::string>();
  }
  if (doc.contains("tie_rule")) {
    cfg.tie_rule = tie_rule_from_string(doc["tie_rule"].get<std::string>());
  }
  if (doc.contains("split_ratios")) {
    const Eigen::VectorXd ratios = vector_from_json(doc["split_ratios"], "split_ratios");
    if (ratios.size() != 3) throw ValidationError("split_ratios must have 3 entries");
    cfg.split_ratios = {ratios[0], ratios[1], ratios[2]};
  }
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("parallel")) cfg.parallel = doc["parallel"].get<bool>();
  cfg.validate();
  return cfg;
}

std::string config_to_json(const EnsembleConfig& cfg) {
  OrderedJson doc;
  doc["vikor_v"] = cfg.vikor_v;
  doc["bankruptcy_fraction"] = cfg.bankruptcy_fraction;
  doc["metrics"] = OrderedJson::array();
  for (Metric metric : cfg.metrics) doc["metrics"].push_back(std::string(to_string(metric)));
  if (cfg.stage2_metric_weights.size() != 0) {
    doc["stage2_metric_weights"] = vector_to_json(cfg.stage2_metric_weights);
  }
  doc["value_concepts"] = OrderedJson::array();
  for (ValueConcept concept_tag : cfg.concepts) {
    doc["value_concepts"].push_back(std::string(to_string(concept_tag)));
  }
  doc["selection_policy"] = cfg.selection_policy;
  doc["tie_rule"] = std::string(to_string(cfg.tie_rule));
  doc["split_ratios"] = {cfg.split_ratios[0], cfg.split_ratios[1], cfg.split_ratios[2]};
  doc["seed"] = cfg.seed;
  doc["parallel"] = cfg.parallel;
  return doc.dump(2) + "\n";
}

CoalitionGame read_game_file(const std::filesystem::path& path) {
  const OrderedJson doc = parse_json(path);
  if (!doc.is_object()) throw ValidationError("game file must be a JSON object");
  reject_unknown_keys(doc, {"demands", "fraction", "table"}, "game file " + path.string());
  if (doc.contains("table")) {
    if (doc.contains("demands") || doc.contains("fraction")) {
      throw ValidationError("game file: \"table\" excludes \"demands\"/\"fraction\"");
    }
    return game_from_table(vector_from_json(doc["table"], "table"));
  }
  if (!doc.contains("demands")) {
    throw ValidationError("game file needs \"demands\" or \"table\"");
  }
  const Eigen::VectorXd demands = vector_from_json(doc["demands"], "demands");
  const double fraction = doc.value("fraction", 0.8);
  return bankruptcy_game(demands, fraction);
}

void write_game_file(const std::filesystem::path& path, const CoalitionGame& game) {
  OrderedJson doc;
  if (game.demands.size() != 0) {
    doc["demands"] = vector_to_json(game.demands);
    doc["fraction"] = game.estate_fraction;
  } else {
    doc["table"] = vector_to_json(game.table);
  }
  write_text(path, doc.dump(2) + "\n");
}

namespace {

OrderedJson weight_vector_to_json(const WeightVector& weights) {
  OrderedJson doc;
  doc["values"] = vector_to_json(weights.weights);
  doc["provenance"] = weights.provenance;
  doc["uniform_fallback"] = weights.uniform_fallback;
  doc["clamp_fired"] = weights.clamp_fired;
  return doc;
}

WeightVector weight_vector_from_json(const OrderedJson& doc, const std::string& where) {
  WeightVector weights;
  weights.weights = vector_from_json(doc.at("values"), where + ".values");
  weights.provenance = doc.at("provenance").get<std::string>();
  weights.uniform_fallback = doc.at("uniform_fallback").get<bool>();
  weights.clamp_fired = doc.at("clamp_fired").get<bool>();
  return weights;
}

}  // namespace

WeightsFile read_weights_file(const std::filesystem::path& path) {
  const OrderedJson doc = parse_json(path);
  WeightsFile file;
  for (const auto& item : doc.at("classifiers")) {
    file.classifier_names.push_back(item.get<std::string>());
  }
  file.chosen = doc.at("chosen").get<std::string>();
  for (const auto& [tag, entry] : doc.at("weights").items()) {
    file.entries.emplace_back(tag, weight_vector_from_json(entry, "weights." + tag));
  }
  file.evaluation = vector_from_json(doc.at("evaluation_vector"), "evaluation_vector");
  for (const auto& item : doc.at("diagnostics")) {
    file.diagnostics.push_back(item.get<std::string>());
  }
  return file;
}

void write_weights_file(const std::filesystem::path& path, const WeightsFile& weights) {
  OrderedJson doc;
  doc["classifiers"] = weights.classifier_names;
  doc["chosen"] = weights.chosen;
  doc["weights"] = OrderedJson::object();
  for (const auto& [tag, entry] : weights.entries) {
    doc["weights"][tag] = weight_vector_to_json(entry);
  }
  doc["evaluation_vector"] = vector_to_json(weights.evaluation);
  doc["diagnostics"] = weights.diagnostics;
  write_text(path, doc.dump(2) + "\n");
}

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "md") return ReportFormat::Md;
  throw ValidationError("unknown report format: " + std::string(name));
}

namespace {

// Short column labels for the value-comparison grid.
std::string concept_column(const std::string& tag) {
  if (tag == "SHAPLEY") return "Shapley";
  if (tag == "BANZHAF") return "Banzhaf";
  if (tag == "SOLIDARITY") return "SO";
  if (tag == "CONSENSUS") return "CON";
  return tag;  // CIS, ENSC, ENPAC, ENBC
}

std::string emit_csv(const Report& report) {
  std::ostringstream out;
  out << "data";
  for (const auto& [method, unused] : report.method_accuracy) out << "," << method;
  out << "\n" << report.dataset;
  for (const auto& [unused, accuracy] : report.method_accuracy) out << "," << format_4dp(accuracy);
  out << "\n\ndata";
  for (const auto& [tag, unused] : report.value_accuracy) out << "," << concept_column(tag);
  out << "\n" << report.dataset;
  for (const auto& [unused, accuracy] : report.value_accuracy) out << "," << format_4dp(accuracy);
  out << "\n";
  return out.str();
}

std::string emit_md(const Report& report) {
  std::ostringstream out;
  out << "### Accuracy by method\n\n| Data |";
  for (const auto& [method, unused] : report.method_accuracy) out << " " << method << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < report.method_accuracy.size(); ++i) out << "---|";
  out << "\n| " << report.dataset << " |";
  for (const auto& [unused, accuracy] : report.method_accuracy) {
    out << " " << format_4dp(accuracy) << " |";
  }
  out << "\n\n### Accuracy by value\n\n| Data |";
  for (const auto& [tag, unused] : report.value_accuracy) out << " " << concept_column(tag) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < report.value_accuracy.size(); ++i) out << "---|";
  out << "\n| " << report.dataset << " |";
  for (const auto& [unused, accuracy] : report.value_accuracy) {
    out << " " << format_4dp(accuracy) << " |";
  }
  out << "\n";
  return out.str();
}

std::string emit_json(const Report& report) {
  OrderedJson doc;
  doc["dataset"] = report.dataset;
  doc["classes"] = report.class_count;
  doc["classifiers"] = report.classifier_names;
  doc["chosen_concept"] = report.chosen_concept;
  doc["method_accuracy"] = OrderedJson::object();
  for (const auto& [method, accuracy] : report.method_accuracy) {
    doc["method_accuracy"][method] = accuracy;
  }
  doc["value_accuracy"] = OrderedJson::object();
  for (const auto& [tag, accuracy] : report.value_accuracy) {
    doc["value_accuracy"][tag] = accuracy;
  }
  doc["weights"] = OrderedJson::object();
  for (const auto& [tag, weights] : report.weight_vectors) {
    doc["weights"][tag] = weight_vector_to_json(weights);
  }
  doc["evaluation_vector"] = vector_to_json(report.evaluation);
  doc["estate"] = report.estate;
  doc["settings"] = {{"vikor_v", report.vikor_v},
                     {"bankruptcy_fraction", report.bankruptcy_fraction},
                     {"tie_rule", report.tie_rule},
                     {"selection_split", report.selection_split}};
  doc["diagnostics"] = report.diagnostics;
  return doc.dump(2) + "\n";
}

}  // namespace

std::string emit_report(const Report& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return emit_json(report);
    case ReportFormat::Csv: return emit_csv(report);
    case ReportFormat::Md: return emit_md(report);
  }
  return emit_json(report);
}

Report parse_report_json(const std::string& text) {
  OrderedJson doc = OrderedJson::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ValidationError("invalid report JSON");
  Report report;
  report.dataset = doc.at("dataset").get<std::string>();
  report.class_count = doc.at("classes").get<int>();
  for (const auto& item : doc.at("classifiers")) {
    report.classifier_names.push_back(item.get<std::string>());
  }
  report.chosen_concept = doc.at("chosen_concept").get<std::string>();
  for (const auto& [method, accuracy] : doc.at("method_accuracy").items()) {
    report.method_accuracy.emplace_back(method, accuracy.get<double>());
  }
  for (const auto& [tag, accuracy] : doc.at("value_accuracy").items()) {
    report.value_accuracy.emplace_back(tag, accuracy.get<double>());
  }
  for (const auto& [tag, entry] : doc.at("weights").items()) {
    report.weight_vectors.emplace_back(tag, weight_vector_from_json(entry, "weights." + tag));
  }
  report.evaluation = vector_from_json(doc.at("evaluation_vector"), "evaluation_vector");
  report.estate = doc.at("estate").get<double>();
  const OrderedJson& settings = doc.at("settings");
  report.vikor_v = settings.at("vikor_v").get<double>();
  report.bankruptcy_fraction = settings.at("bankruptcy_fraction").get<double>();
  report.tie_rule = settings.at("tie_rule").get<std::string>();
  report.selection_split = settings.at("selection_split").get<std::string>();
  for (const auto& item : doc.at("diagnostics")) {
    report.diagnostics.push_back(item.get<std::string>());
  }
  return report;
}

}  // namespace cgvote
