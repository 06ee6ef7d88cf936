#include "ecgres/types.hpp"

#include "ecgres/errors.hpp"

namespace ecgres {

const char* label_name(BeatLabel label) {
    switch (label) {
    case BeatLabel::Normal: return "Normal";
    case BeatLabel::Lbbb: return "LBBB";
    case BeatLabel::Rbbb: return "RBBB";
    case BeatLabel::Pvc: return "PVC";
    case BeatLabel::Paced: return "Paced";
    case BeatLabel::Apb: return "APB";
    case BeatLabel::Other: return "Other";
    }
    return "?";
}

BeatLabel label_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(BeatLabel::Other); ++i) {
        auto label = static_cast<BeatLabel>(i);
        if (name == label_name(label))
            return label;
    }
    throw Error(ErrorCode::Format, "unknown beat label: " + name);
}

} // namespace ecgres
