#include <charconv>
#include <sstream>

#include "hclab/operators.hpp"

namespace hclab {

TruncatedOperator rolewicz(Complex lambda) {
    std::ostringstream label;
    label << lambda.real();
    if (lambda.imag() != 0.0) label << (lambda.imag() > 0 ? "+" : "") << lambda.imag() << "i";
    label << "*B";
    return TruncatedOperator::weighted_backward_shift([lambda](std::size_t) { return lambda; },
                                                      true, label.str());
}

TruncatedOperator salas(Complex c) {
    auto shift = TruncatedOperator::weighted_backward_shift([c](std::size_t) { return c; }, true,
                                                            "B_" + std::to_string(c.real()));
    return TruncatedOperator::identity_plus(shift);
}

TruncatedOperator maclane() {
    return TruncatedOperator::weighted_backward_shift(
        [](std::size_t i) { return Complex(static_cast<double>(i), 0.0); }, true, "D");
}

const std::vector<ZooEntry>& zoo_entries() {
    static const std::vector<ZooEntry> entries = {
        {"identity", "identity operator I"},
        {"zero", "zero operator"},
        {"rolewicz:<lambda>", "lambda*B, B the unweighted backward shift (hypercyclic iff |lambda|>1)"},
        {"salas:ones", "I + B, identity plus the unweighted backward shift"},
        {"salas:<c>", "I + c*B"},
        {"maclane", "differentiation in Taylor coordinates, weighted shift w_i = i"},
        {"diag:<c>", "constant diagonal c*I realized as a diagonal operator"},
        {"harmonic", "diagonal diag(1, 1/2, 1/3, ...)"},
    };
    return entries;
}

namespace {

[[noreturn]] void unknown(std::string_view id) {
    std::string msg = "unknown operator id '" + std::string(id) + "'; known ids:";
    for (const auto& e : zoo_entries()) msg += "\n  " + e.id + "  " + e.description;
    throw InvalidArgument(msg);
}

double parse_real(std::string_view id, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) unknown(id);
    return v;
}

// "2", "1.5i", "1+2i", "0.5-i"
Complex parse_param(std::string_view id, std::string_view text) {
    if (text.empty() || text.back() != 'i') return {parse_real(id, text), 0.0};
    text.remove_suffix(1);
    // split at the last sign that is not the leading one or an exponent sign
    std::size_t cut = 0;
    for (std::size_t k = text.size(); k-- > 1;) {
        if ((text[k] == '+' || text[k] == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
            cut = k;
            break;
        }
    }
    const auto re = text.substr(0, cut), im = text.substr(cut);
    const double imag = im.empty() || im == "+" ? 1.0 : im == "-" ? -1.0 : parse_real(id, im);
    return {re.empty() ? 0.0 : parse_real(id, re), imag};
}

} // namespace

TruncatedOperator make_operator(std::string_view id) {
    const auto colon = id.find(':');
    const auto name = id.substr(0, colon);
    const auto param = colon == std::string_view::npos ? std::string_view{} : id.substr(colon + 1);
    const bool has_param = colon != std::string_view::npos;

    if (name == "identity" && !has_param) return TruncatedOperator::identity();
    if (name == "zero" && !has_param) return TruncatedOperator::zero();
    if (name == "maclane" && !has_param) return maclane();
    if (name == "harmonic" && !has_param) {
        return TruncatedOperator::diagonal(
            [](std::size_t i) { return Complex(1.0 / static_cast<double>(i), 0.0); }, "harmonic");
    }
    if (name == "rolewicz" && has_param) return rolewicz(parse_param(id, param));
    if (name == "salas" && has_param) {
        return salas(param == "ones" ? Complex(1.0) : parse_param(id, param));
    }
    if (name == "diag" && has_param) {
        const Complex c = parse_param(id, param);
        return TruncatedOperator::diagonal([c](std::size_t) { return c; },
                                           "diag(" + std::string(param) + ")");
    }
    unknown(id);
}

} // namespace hclab
