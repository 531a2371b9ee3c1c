#include "grounder/chat.hpp"

namespace grounder {

const char* msg_role_name(MsgRole r) {
    switch (r) {
        case MsgRole::System:
            return "system";
        case MsgRole::User:
            return "user";
        case MsgRole::Assistant:
            return "assistant";
    }
    return "user";
}

}  // namespace grounder
