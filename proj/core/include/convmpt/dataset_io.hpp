#ifndef CONVMPT_DATASET_IO_HPP
#define CONVMPT_DATASET_IO_HPP

#include <string>

#include "convmpt/data.hpp"

namespace convmpt {

enum class DatasetFormat { jsonl, csv_dir };

DatasetFormat parse_dataset_format(const std::string& name);

/// Loads and validates a dataset. JSONL: one bag object per line,
/// {"id": str, "label": int, "instances": [[f64,...],...]} with one row per
/// instance. csv-dir: a directory with labels.csv (id,label) plus <id>.csv
/// per bag, one instance per row. Labels may be {-1,+1} or {0,1}; the latter
/// are remapped to {-1,+1} and dataset.labels_remapped is set.
Dataset load_dataset(const std::string& path, DatasetFormat format);

/// Writes a dataset in the given format. Feature values are serialized with
/// shortest round-trip decimal form, so load_dataset(save_dataset(ds))
/// reproduces every field bit-exactly.
void save_dataset(const Dataset& dataset, const std::string& path,
                  DatasetFormat format);

}  // namespace convmpt

#endif  // CONVMPT_DATASET_IO_HPP
