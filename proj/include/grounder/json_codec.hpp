#pragma once

#include <json.hpp>

#include "grounder/chat.hpp"
#include "grounder/ensemble.hpp"
#include "grounder/geometry.hpp"

namespace grounder {

nlohmann::json point_to_json(const Point& p);
Point point_from_json(const nlohmann::json& j);

nlohmann::json bbox_to_json(const BBox& b);
BBox bbox_from_json(const nlohmann::json& j);

nlohmann::json screenshot_to_json(const ScreenshotMeta& m);
ScreenshotMeta screenshot_from_json(const nlohmann::json& j);

nlohmann::json task_to_json(const TaskSpec& t);
TaskSpec task_from_json(const nlohmann::json& j);

nlohmann::json message_to_json(const ChatMessage& m);
ChatMessage message_from_json(const nlohmann::json& j);
nlohmann::json messages_to_json(const std::vector<ChatMessage>& ms);

const char* coord_mode_name(CoordMode m);
CoordMode coord_mode_from_string(const std::string& s);

nlohmann::json endpoint_to_json(const EndpointConfig& cfg);
EndpointConfig endpoint_from_json(const nlohmann::json& j);

const char* endpoint_role_name(EndpointRole r);
EndpointRole endpoint_role_from_string(const std::string& s);

}  // namespace grounder
