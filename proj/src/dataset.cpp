#include "grounder/dataset.hpp"

#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "grounder/errors.hpp"
#include "grounder/json_codec.hpp"
#include "grounder/util.hpp"

namespace grounder {

using nlohmann::json;

const char* dataset_source_name(DatasetSource s) {
    switch (s) {
        case DatasetSource::ScreenSpot:
            return "screenspot";
        case DatasetSource::UII2E:
            return "uii2e";
        case DatasetSource::Custom:
            return "custom";
    }
    return "custom";
}

DatasetSource dataset_source_from_string(const std::string& s) {
    if (s == "screenspot") return DatasetSource::ScreenSpot;
    if (s == "uii2e" || s == "ui-i2e" || s == "ui_i2e") return DatasetSource::UII2E;
    if (s == "custom") return DatasetSource::Custom;
    throw ConfigError("unknown dataset source: " + s +
                      " (expected screenspot, uii2e, or custom)");
}

namespace {

std::string first_string(const json& j, std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        if (j.contains(k) && j.at(k).is_string()) return j.at(k).get<std::string>();
    }
    return "";
}

std::vector<double> bbox_values(const json& j, int line) {
    if (!j.is_array() || j.size() != 4) {
        throw SchemaError(line, "bbox must be an array of four numbers");
    }
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) throw SchemaError(line, "bbox must be an array of four numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

std::pair<int, int> resolve_dims(const json& j, const std::string& image_path, int line) {
    if (j.contains("width") && j.contains("height")) {
        return {j.at("width").get<int>(), j.at("height").get<int>()};
    }
    if (j.contains("img_size") && j.at("img_size").is_array() && j.at("img_size").size() == 2) {
        return {j.at("img_size")[0].get<int>(), j.at("img_size")[1].get<int>()};
    }
    if (auto dims = read_image_dims(image_path)) return *dims;
    throw SchemaError(line,
                      "cannot determine image dimensions (no width/height or img_size field, "
                      "and the image file is missing or unreadable)");
}

// Pixel box, already [x1,y1,x2,y2]. Fractional inputs are rounded outward
// so a valid upstream box stays non-empty.
BBox outward_box(double x1, double y1, double x2, double y2) {
    return BBox{static_cast<int>(std::floor(x1)), static_cast<int>(std::floor(y1)),
                static_cast<int>(std::ceil(x2)), static_cast<int>(std::ceil(y2))};
}

DatasetRecord adapt_record(const json& j, DatasetSource source, int line,
                           const std::filesystem::path& base_dir) {
    TaskSpec task;
    task.instruction = first_string(j, {"instruction", "prompt", "intent"});
    if (trim(task.instruction).empty()) throw SchemaError(line, "instruction must be non-empty");

    std::string image = first_string(j, {"image", "img_filename", "image_path", "img_path"});
    if (image.empty()) throw SchemaError(line, "missing image path");
    std::filesystem::path resolved(image);
    if (resolved.is_relative()) resolved = base_dir / resolved;
    task.screenshot.image_ref = resolved.string();
    task.screenshot.format = image_format_from_path(image);

    auto [w, h] = resolve_dims(j, task.screenshot.image_ref, line);
    if (w <= 0 || h <= 0) throw SchemaError(line, "image dimensions must be positive");
    task.screenshot.width = w;
    task.screenshot.height = h;

    if (!j.contains("bbox")) throw SchemaError(line, "missing bbox");
    auto v = bbox_values(j.at("bbox"), line);

    BBox box;
    switch (source) {
        case DatasetSource::Custom:
            box = BBox{static_cast<int>(std::llround(v[0])), static_cast<int>(std::llround(v[1])),
                       static_cast<int>(std::llround(v[2])), static_cast<int>(std::llround(v[3]))};
            break;
        case DatasetSource::ScreenSpot:
            // Upstream boxes are [x, y, w, h] in pixels.
            box = outward_box(v[0], v[1], v[0] + v[2], v[1] + v[3]);
            break;
        case DatasetSource::UII2E: {
            // Boxes at or below 1.0 in every coordinate are normalized to
            // [0, 1]; a pixel-space box that small would be degenerate.
            bool normalized = v[0] <= 1.0 && v[1] <= 1.0 && v[2] <= 1.0 && v[3] <= 1.0;
            if (normalized) {
                box = outward_box(v[0] * w, v[1] * h, v[2] * w, v[3] * h);
            } else {
                box = outward_box(v[0], v[1], v[2], v[3]);
            }
            break;
        }
    }
    if (!box.valid()) throw SchemaError(line, "bbox is not a valid box (x1 < x2, y1 < y2)");
    if (box.x2 > w || box.y2 > h) {
        throw SchemaError(line, "bbox exceeds the screenshot bounds");
    }
    task.gt_box = box;

    task.platform = platform_from_string(first_string(j, {"platform", "data_source", "source"}));
    std::string element = first_string(j, {"element_type", "data_type", "type"});
    task.element_type = element_type_from_string(element);

    DatasetRecord record;
    record.task = std::move(task);
    record.source = source;
    record.record_id = first_string(j, {"id", "record_id"});
    if (record.record_id.empty()) {
        record.record_id = std::string(dataset_source_name(source)) + "-" + std::to_string(line);
    }
    return record;
}

}  // namespace

std::vector<DatasetRecord> load_dataset(const std::string& path, DatasetSource source) {
    auto text = read_file(path);
    if (!text) throw FileNotFound("dataset not found: " + path);
    std::filesystem::path base_dir = std::filesystem::path(path).parent_path();

    std::vector<DatasetRecord> records;
    std::vector<std::string> seen_ids;
    int line_no = 0;
    for (const auto& line : split_lines(*text)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaError(line_no, std::string("invalid JSON: ") + e.what());
        }
        DatasetRecord record = adapt_record(j, source, line_no, base_dir);
        for (const auto& id : seen_ids) {
            if (id == record.record_id) {
                throw SchemaError(line_no, "duplicate record id '" + record.record_id + "'");
            }
        }
        seen_ids.push_back(record.record_id);
        records.push_back(std::move(record));
    }
    if (records.empty()) throw EmptyDataset("dataset has no records: " + path);
    return records;
}

}  // namespace grounder
