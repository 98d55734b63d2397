/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "calboost/harness.h"

namespace calboost {
namespace {

std::string_view Trim(std::string_view s) {
  const auto not_space = [](char c) {
    return c != ' ' && c != '\t' && c != '\r' && c != '\n';
  };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(Trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.emplace_back(Trim(field));
  return fields;
}

std::optional<double> ParseNumber(std::string_view text) {
  text = Trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

LabelledData ParseCsv(std::istream& in, const CsvOptions& options) {
  std::string line;
  int64_t line_number = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_number;
    if (!Trim(line).empty()) {
      header = SplitCsvLine(line);
      break;
    }
  }
  if (header.empty()) throw ParseError("empty CSV input");
  if (std::all_of(header.begin(), header.end(),
                  [](const std::string& f) { return ParseNumber(f).has_value(); })) {
    throw ParseError("line " + std::to_string(line_number) +
                     ": expected a header row, found numeric values");
  }

  size_t label_index = header.size() - 1;
  if (!options.label_column.empty()) {
    const auto it =
        std::find(header.begin(), header.end(), options.label_column);
    if (it == header.end()) {
      throw std::invalid_argument("label column not found: " +
                                  options.label_column);
    }
    label_index = static_cast<size_t>(it - header.begin());
  }

  LabelledData data;
  data.label_column = header[label_index];
  for (size_t c = 0; c < header.size(); ++c) {
    if (c != label_index) data.feature_names.push_back(header[c]);
  }

  std::vector<std::string> raw_labels;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_number) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    Example example;
    example.features.reserve(header.size() - 1);
    for (size_t c = 0; c < fields.size(); ++c) {
      if (c == label_index) continue;
      const std::optional<double> value = ParseNumber(fields[c]);
      if (!value) {
        throw ParseError("line " + std::to_string(line_number) + ", column '" +
                         header[c] + "': non-numeric feature '" + fields[c] +
                         "'");
      }
      example.features.push_back(*value);
    }
    raw_labels.push_back(fields[label_index]);
    ++data.class_counts[fields[label_index]];
    data.examples.push_back(std::move(example));
  }

  if (options.positive_classes.empty()) {
    std::string best;
    int64_t best_count = -1;
    for (const auto& [value, count] : data.class_counts) {
      if (count > best_count) {
        best = value;
        best_count = count;
      }
    }
    if (best_count > 0) data.positive_classes = {best};
  } else {
    for (const std::string& value : options.positive_classes) {
      if (!data.class_counts.contains(value)) {
        std::string known;
        for (const auto& [v, n] : data.class_counts) {
          known += (known.empty() ? "" : ", ") + v;
        }
        throw std::invalid_argument("positive class '" + value +
                                    "' does not occur; labels are: " + known);
      }
    }
    data.positive_classes = options.positive_classes;
  }

  for (size_t i = 0; i < data.examples.size(); ++i) {
    const bool positive =
        std::find(data.positive_classes.begin(), data.positive_classes.end(),
                  raw_labels[i]) != data.positive_classes.end();
    data.examples[i].label = positive ? 1 : -1;
  }
  return data;
}

LabelledData LoadCsv(const std::filesystem::path& path,
                     const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ParseCsv(in, options);
}

SyntheticSpec SyntheticSpec::Parse(std::string_view text) {
  SyntheticSpec spec;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string_view kv = Trim(item);
    if (kv.empty()) continue;
    const size_t eq = kv.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("synthetic spec item without '=': " +
                                  std::string(kv));
    }
    const std::string_view key = Trim(kv.substr(0, eq));
    const std::optional<double> value = ParseNumber(kv.substr(eq + 1));
    if (!value) {
      throw std::invalid_argument("synthetic spec value is not a number: " +
                                  std::string(kv));
    }
    if (key == "n") {
      spec.n_examples = static_cast<int64_t>(*value);
    } else if (key == "d") {
      spec.dims = static_cast<int>(*value);
    } else if (key == "delta") {
      spec.delta = *value;
    } else if (key == "drift") {
      spec.drift = *value;
    } else {
      throw std::invalid_argument("unknown synthetic spec key: " +
                                  std::string(key));
    }
  }
  if (spec.n_examples < 1) throw std::invalid_argument("synthetic n must be >= 1");
  if (spec.dims < 1) throw std::invalid_argument("synthetic d must be >= 1");
  if (spec.delta < 0.0) throw std::invalid_argument("synthetic delta must be >= 0");
  return spec;
}

std::string SyntheticSpec::ToString() const {
  std::ostringstream out;
  out << "n=" << n_examples << ",d=" << dims << ",delta=" << delta
      << ",drift=" << drift;
  return out.str();
}

std::vector<Example> GenerateSynthetic(const SyntheticSpec& spec,
                                       int block_size, RngStream& rng) {
  if (block_size < 1) throw std::invalid_argument("block size must be >= 1");
  const size_t n = static_cast<size_t>(spec.n_examples);
  std::vector<int> labels(n, -1);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n / 2), 1);
  Shuffle(std::span<int>(labels), rng);

  std::vector<Example> examples(n);
  for (size_t i = 0; i < n; ++i) {
    const double shift =
        spec.drift * static_cast<double>(i / static_cast<size_t>(block_size));
    const double center = labels[i] * spec.delta / 2.0 + shift;
    examples[i].label = labels[i];
    examples[i].features.resize(static_cast<size_t>(spec.dims));
    for (double& v : examples[i].features) v = SampleGaussian(center, 1.0, rng);
  }
  return examples;
}

std::vector<Minibatch> MakeStream(std::vector<Example> examples, int batch_size,
                                  bool stationary, RngStream& rng) {
  if (examples.empty()) throw std::invalid_argument("empty dataset");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (stationary) Shuffle(std::span<Example>(examples), rng);

  const size_t b = static_cast<size_t>(batch_size);
  std::vector<Minibatch> stream;
  stream.reserve((examples.size() + b - 1) / b);
  for (size_t start = 0; start < examples.size(); start += b) {
    Minibatch mb;
    mb.index = static_cast<int64_t>(stream.size()) + 1;
    const size_t end = std::min(start + b, examples.size());
    mb.examples.assign(std::make_move_iterator(examples.begin() + static_cast<std::ptrdiff_t>(start)),
                       std::make_move_iterator(examples.begin() + static_cast<std::ptrdiff_t>(end)));
    stream.push_back(std::move(mb));
  }
  return stream;
}

}  // namespace calboost
