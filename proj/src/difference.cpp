#include "dps/difference.hpp"

namespace dps {

std::string to_string(DiffKind k) {
    switch (k) {
        case DiffKind::Right: return "right";
        case DiffKind::Left: return "left";
        case DiffKind::WeightedMean: return "weighted-mean";
    }
    return "?";
}

std::string to_string(LeibnizRule r) {
    switch (r) {
        case LeibnizRule::LeibnizRight: return "leibniz-right";
        case LeibnizRule::LeibnizLeft: return "leibniz-left";
        case LeibnizRule::LeibnizSharpForward: return "leibniz-sharp-forward";
        case LeibnizRule::LeibnizSharpBackward: return "leibniz-sharp-backward";
        case LeibnizRule::SharpSymmetricProduct: return "sharp-symmetric-product";
    }
    return "?";
}

std::string to_string(MixedRule r) {
    switch (r) {
        case MixedRule::WeightedSplit: return "weighted-split";
        case MixedRule::WeightedSplitOfSharp: return "weighted-split-of-sharp";
        case MixedRule::WeightedSquare: return "weighted-square";
        case MixedRule::WeightedSharpProduct: return "weighted-sharp-product";
        case MixedRule::WeightedPairProduct: return "weighted-pair-product";
    }
    return "?";
}

RealField sharp_one_field(const LatticeDomain& d, int axis) {
    check_axis(d, axis);
    return RealField::from_function(
        d, 1, [&](int, const Point& p) { return sharp_of_one(p[static_cast<std::size_t>(axis)]); }, false);
}

RealField sqrt_index_field(const LatticeDomain& d, int axis) {
    check_axis(d, axis);
    return RealField::from_function(d, 1, [&](int, const Point& p) {
        return std::sqrt(static_cast<double>(p[static_cast<std::size_t>(axis)]));
    });
}

}  // namespace dps
