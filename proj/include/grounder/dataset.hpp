#pragma once

#include <string>
#include <vector>

#include "grounder/ensemble.hpp"

namespace grounder {

enum class DatasetSource { ScreenSpot, UII2E, Custom };

const char* dataset_source_name(DatasetSource s);
DatasetSource dataset_source_from_string(const std::string& s);

struct DatasetRecord {
    TaskSpec task;  // gt_box always present
    DatasetSource source = DatasetSource::Custom;
    std::string record_id;
};

/// Loads a JSONL dataset. The canonical schema is one object per line:
///   { "id", "instruction", "image", "bbox": [x1,y1,x2,y2] (pixels),
///     "platform", "element_type", optional "width"/"height" }
/// Source adapters map upstream field names (and normalized boxes) into the
/// canonical schema. Image paths are resolved relative to the dataset file;
/// missing dimensions are read from PNG/JPEG headers. Records with invalid
/// boxes are rejected with their line numbers.
std::vector<DatasetRecord> load_dataset(const std::string& path, DatasetSource source);

}  // namespace grounder
