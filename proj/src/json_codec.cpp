#include "grounder/json_codec.hpp"

#include "grounder/errors.hpp"

namespace grounder {

using nlohmann::json;

json point_to_json(const Point& p) { return json::array({p.x, p.y}); }

Point point_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw Error("point must be a [x, y] array");
    return Point{j[0].get<int>(), j[1].get<int>()};
}

json bbox_to_json(const BBox& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

BBox bbox_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw Error("bbox must be a [x1, y1, x2, y2] array");
    return BBox{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

json screenshot_to_json(const ScreenshotMeta& m) {
    return json{{"width", m.width},
                {"height", m.height},
                {"image_ref", m.image_ref},
                {"format", image_format_name(m.format)}};
}

ScreenshotMeta screenshot_from_json(const json& j) {
    ScreenshotMeta m;
    m.width = j.at("width").get<int>();
    m.height = j.at("height").get<int>();
    m.image_ref = j.value("image_ref", "");
    m.format = j.value("format", "png") == std::string("jpeg") ? ImageFormat::Jpeg
                                                               : ImageFormat::Png;
    return m;
}

json task_to_json(const TaskSpec& t) {
    json j;
    j["instruction"] = t.instruction;
    j["screenshot"] = screenshot_to_json(t.screenshot);
    j["platform"] = platform_name(t.platform);
    j["element_type"] = t.element_type ? json(element_type_name(*t.element_type)) : json(nullptr);
    j["gt_box"] = t.gt_box ? bbox_to_json(*t.gt_box) : json(nullptr);
    return j;
}

TaskSpec task_from_json(const json& j) {
    TaskSpec t;
    t.instruction = j.at("instruction").get<std::string>();
    t.screenshot = screenshot_from_json(j.at("screenshot"));
    t.platform = platform_from_string(j.value("platform", "unknown"));
    if (j.contains("element_type") && !j.at("element_type").is_null()) {
        t.element_type = element_type_from_string(j.at("element_type").get<std::string>());
    }
    if (j.contains("gt_box") && !j.at("gt_box").is_null()) {
        t.gt_box = bbox_from_json(j.at("gt_box"));
    }
    return t;
}

json message_to_json(const ChatMessage& m) {
    json j;
    j["role"] = msg_role_name(m.role);
    j["text"] = m.text;
    json images = json::array();
    for (const auto& img : m.images) images.push_back(screenshot_to_json(img));
    j["images"] = images;
    return j;
}

ChatMessage message_from_json(const json& j) {
    ChatMessage m;
    std::string role = j.at("role").get<std::string>();
    m.role = role == "system" ? MsgRole::System
                              : (role == "assistant" ? MsgRole::Assistant : MsgRole::User);
    m.text = j.at("text").get<std::string>();
    for (const auto& img : j.value("images", json::array())) {
        m.images.push_back(screenshot_from_json(img));
    }
    return m;
}

json messages_to_json(const std::vector<ChatMessage>& ms) {
    json arr = json::array();
    for (const auto& m : ms) arr.push_back(message_to_json(m));
    return arr;
}

const char* coord_mode_name(CoordMode m) {
    return m == CoordMode::AbsolutePixels ? "absolute_pixels" : "normalized_thousand";
}

CoordMode coord_mode_from_string(const std::string& s) {
    if (s == "absolute" || s == "absolute_pixels" || s == "pixels") {
        return CoordMode::AbsolutePixels;
    }
    if (s == "normalized_1000" || s == "normalized_thousand" || s == "norm1000") {
        return CoordMode::NormalizedThousand;
    }
    throw Error("unknown coordinate convention: " + s +
                " (expected absolute_pixels or normalized_thousand)");
}

const char* endpoint_role_name(EndpointRole r) {
    return r == EndpointRole::General ? "general" : "specialist";
}

EndpointRole endpoint_role_from_string(const std::string& s) {
    if (s == "general") return EndpointRole::General;
    if (s == "specialist") return EndpointRole::Specialist;
    throw Error("unknown endpoint role: " + s + " (expected specialist or general)");
}

json endpoint_to_json(const EndpointConfig& cfg) {
    return json{{"id", cfg.id},
                {"base_url", cfg.base_url},
                {"model", cfg.model_name},
                {"role", endpoint_role_name(cfg.role)},
                {"coord_convention", coord_mode_name(cfg.coord.mode)},
                {"timeout_ms", cfg.timeout_ms},
                {"max_retries", cfg.max_retries},
                {"max_output_tokens", cfg.max_output_tokens},
                {"temperature", cfg.temperature}};
}

EndpointConfig endpoint_from_json(const json& j) {
    EndpointConfig cfg;
    cfg.id = j.at("id").get<std::string>();
    cfg.base_url = j.value("base_url", "");
    cfg.model_name = j.value("model", "");
    cfg.role = endpoint_role_from_string(j.value("role", "specialist"));
    cfg.coord.mode = coord_mode_from_string(j.value("coord_convention", "absolute_pixels"));
    cfg.timeout_ms = j.value("timeout_ms", std::int64_t{60000});
    cfg.max_retries = j.value("max_retries", 2);
    cfg.max_output_tokens = j.value("max_output_tokens", 512);
    cfg.temperature = j.value("temperature", 0.0);
    return cfg;
}

}  // namespace grounder
