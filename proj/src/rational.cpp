#include "confgc/rational.hpp"

#include "confgc/errors.hpp"

namespace confgc {

Rational parse_rational(const std::string& s, int line) {
    if (s.empty()) throw ParseError(line, "empty rational");
    std::string t = s;
    for (char c : t)
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '/'))
            throw ParseError(line, "bad character in rational '" + s + "'");
    try {
        Rational r(t);
        r.canonicalize();
        if (r.get_den() == 0) throw ParseError(line, "zero denominator in '" + s + "'");
        return r;
    } catch (const std::invalid_argument&) {
        throw ParseError(line, "malformed rational '" + s + "'");
    }
}

std::string rational_to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

} // namespace confgc
