#include "convmpt/dataset_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "convmpt/error.hpp"

namespace convmpt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string shortest_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

double parse_double(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end)
    throw DataError(where + ": bad numeric value '" + token + "'");
  return value;
}

// Raw labels may use either the {-1,+1} or the {0,1} convention; the two
// must not be mixed within one file.
void remap_labels(Dataset& dataset, const std::string& origin) {
  bool saw_zero = false;
  bool saw_minus_one = false;
  for (const Bag& bag : dataset.bags) {
    if (bag.label == 0) saw_zero = true;
    if (bag.label == -1) saw_minus_one = true;
    if (bag.label != 0 && bag.label != 1 && bag.label != -1)
      throw DataError(origin + ": bag '" + bag.id + "' has label " +
                      std::to_string(bag.label) + ", expected -1/+1 or 0/1");
  }
  if (saw_zero && saw_minus_one)
    throw DataError(origin + ": mixes {0,1} and {-1,+1} label conventions");
  if (saw_zero) {
    for (Bag& bag : dataset.bags) bag.label = bag.label == 0 ? -1 : 1;
    dataset.labels_remapped = true;
  }
}

Dataset load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");

  Dataset dataset;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + ": malformed JSON record: " + e.what());
    }
    if (!record.is_object() || !record.contains("id") ||
        !record.contains("label") || !record.contains("instances"))
      throw DataError(where + ": record must have id, label and instances");
    if (!record["id"].is_string() || !record["label"].is_number_integer() ||
        !record["instances"].is_array())
      throw DataError(where + ": wrong field types in record");

    Bag bag;
    bag.id = record["id"].get<std::string>();
    bag.label = record["label"].get<int>();

    const json& rows = record["instances"];
    if (rows.empty()) throw DataError(where + ": bag has no instances");
    const std::size_t d = rows[0].is_array() ? rows[0].size() : 0;
    if (d == 0) throw DataError(where + ": instances must be non-empty arrays");
    bag.instances.resize(static_cast<Eigen::Index>(d),
                         static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const json& row = rows[r];
      if (!row.is_array() || row.size() != d)
        throw DataError(where + ": instance " + std::to_string(r) +
                        " has inconsistent length");
      for (std::size_t c = 0; c < d; ++c) {
        if (!row[c].is_number())
          throw DataError(where + ": non-numeric feature value");
        bag.instances(static_cast<Eigen::Index>(c),
                      static_cast<Eigen::Index>(r)) = row[c].get<double>();
      }
    }

    if (dataset.bags.empty()) {
      dataset.d = bag.dim();
    } else if (bag.dim() != dataset.d) {
      throw DataError(where + ": bag dimension " + std::to_string(bag.dim()) +
                      " conflicts with earlier dimension " +
                      std::to_string(dataset.d));
    }
    dataset.bags.push_back(std::move(bag));
  }
  if (dataset.bags.empty()) throw DataError(path + ": no bags found");
  remap_labels(dataset, path);
  validate_dataset(dataset);
  return dataset;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    std::size_t start = field.find_first_not_of(' ');
    fields.push_back(start == std::string::npos ? "" : field.substr(start));
  }
  return fields;
}

Dataset load_csv_dir(const std::string& path) {
  const fs::path dir(path);
  const fs::path manifest = dir / "labels.csv";
  std::ifstream in(manifest);
  if (!in)
    throw DataError("cannot open manifest '" + manifest.string() + "'");

  Dataset dataset;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = manifest.string() + ":" + std::to_string(line_no);
    auto fields = split_csv_line(line);
    if (line_no == 1 && fields.size() == 2 && fields[0] == "id" &&
        fields[1] == "label")
      continue;  // optional header
    if (fields.size() != 2)
      throw DataError(where + ": expected 'id,label'");

    Bag bag;
    bag.id = fields[0];
    try {
      std::size_t used = 0;
      bag.label = std::stoi(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument(fields[1]);
    } catch (const std::exception&) {
      throw DataError(where + ": bad label '" + fields[1] + "'");
    }

    const fs::path bag_path = dir / (bag.id + ".csv");
    std::ifstream bag_in(bag_path);
    if (!bag_in)
      throw DataError(where + ": missing bag file '" + bag_path.string() + "'");
    std::vector<std::vector<double>> rows;
    std::string bag_line;
    std::size_t bag_line_no = 0;
    while (std::getline(bag_in, bag_line)) {
      ++bag_line_no;
      if (bag_line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::string bag_where =
          bag_path.string() + ":" + std::to_string(bag_line_no);
      auto tokens = split_csv_line(bag_line);
      std::vector<double> row;
      row.reserve(tokens.size());
      for (const auto& token : tokens) row.push_back(parse_double(token, bag_where));
      if (!rows.empty() && row.size() != rows.front().size())
        throw DataError(bag_where + ": inconsistent instance length");
      rows.push_back(std::move(row));
    }
    if (rows.empty())
      throw DataError(bag_path.string() + ": bag has no instances");

    bag.instances.resize(static_cast<Eigen::Index>(rows.front().size()),
                         static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        bag.instances(static_cast<Eigen::Index>(c),
                      static_cast<Eigen::Index>(r)) = rows[r][c];

    if (dataset.bags.empty()) {
      dataset.d = bag.dim();
    } else if (bag.dim() != dataset.d) {
      throw DataError(bag_path.string() + ": bag dimension " +
                      std::to_string(bag.dim()) +
                      " conflicts with earlier dimension " +
                      std::to_string(dataset.d));
    }
    dataset.bags.push_back(std::move(bag));
  }
  if (dataset.bags.empty())
    throw DataError(manifest.string() + ": no bags listed");
  remap_labels(dataset, manifest.string());
  validate_dataset(dataset);
  return dataset;
}

void save_jsonl(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset file '" + path + "'");
  for (const Bag& bag : dataset.bags) {
    json record;
    record["id"] = bag.id;
    record["label"] = bag.label;
    json rows = json::array();
    for (Eigen::Index c = 0; c < bag.size(); ++c) {
      json row = json::array();
      for (Eigen::Index r = 0; r < bag.dim(); ++r)
        row.push_back(bag.instances(r, c));
      rows.push_back(std::move(row));
    }
    record["instances"] = std::move(rows);
    out << record.dump() << '\n';
  }
}

void save_csv_dir(const Dataset& dataset, const std::string& path) {
  const fs::path dir(path);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + path + "'");

  std::ofstream manifest(dir / "labels.csv", std::ios::binary);
  if (!manifest) throw DataError("cannot write manifest in '" + path + "'");
  manifest << "id,label\n";
  for (const Bag& bag : dataset.bags) {
    manifest << bag.id << ',' << bag.label << '\n';
    std::ofstream out(dir / (bag.id + ".csv"), std::ios::binary);
    if (!out)
      throw DataError("cannot write bag file for '" + bag.id + "'");
    for (Eigen::Index c = 0; c < bag.size(); ++c) {
      for (Eigen::Index r = 0; r < bag.dim(); ++r) {
        if (r > 0) out << ',';
        out << shortest_double(bag.instances(r, c));
      }
      out << '\n';
    }
  }
}

}  // namespace

DatasetFormat parse_dataset_format(const std::string& name) {
  if (name == "jsonl") return DatasetFormat::jsonl;
  if (name == "csv-dir") return DatasetFormat::csv_dir;
  throw DataError("unknown dataset format '" + name + "' (jsonl or csv-dir)");
}

Dataset load_dataset(const std::string& path, DatasetFormat format) {
  switch (format) {
    case DatasetFormat::jsonl:
      return load_jsonl(path);
    case DatasetFormat::csv_dir:
      return load_csv_dir(path);
  }
  throw DataError("unreachable dataset format");
}

void save_dataset(const Dataset& dataset, const std::string& path,
                  DatasetFormat format) {
  switch (format) {
    case DatasetFormat::jsonl:
      save_jsonl(dataset, path);
      return;
    case DatasetFormat::csv_dir:
      save_csv_dir(dataset, path);
      return;
  }
}

}  // namespace convmpt
