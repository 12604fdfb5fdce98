#include "litscape/util/xml.hpp"

#include <cctype>

#include "litscape/util/strings.hpp"

namespace litscape::xml {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    std::unique_ptr<Element> parse_document() {
        skip_prolog();
        auto root = parse_element();
        skip_misc();
        if (pos_ != s_.size()) fail("trailing content after document element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) {
        throw XmlError("xml: " + what + " at offset " + std::to_string(pos_));
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    bool looking_at(std::string_view lit) const {
        return s_.substr(pos_, lit.size()) == lit;
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    void skip_until(std::string_view terminator, const char* what) {
        auto at = s_.find(terminator, pos_);
        if (at == std::string_view::npos) fail(std::string("unterminated ") + what);
        pos_ = at + terminator.size();
    }

    void skip_prolog() {
        skip_ws();
        while (!eof()) {
            if (looking_at("<?")) {
                skip_until("?>", "processing instruction");
            } else if (looking_at("<!--")) {
                skip_until("-->", "comment");
            } else if (looking_at("<!DOCTYPE")) {
                // tolerate a simple DOCTYPE without internal subset
                auto close = s_.find('>', pos_);
                if (close == std::string_view::npos) fail("unterminated DOCTYPE");
                pos_ = close + 1;
            } else {
                break;
            }
            skip_ws();
        }
        if (eof() || peek() != '<') fail("expected document element");
    }

    void skip_misc() {
        skip_ws();
        while (!eof()) {
            if (looking_at("<!--")) skip_until("-->", "comment");
            else if (looking_at("<?")) skip_until("?>", "processing instruction");
            else return;
            skip_ws();
        }
    }

    static bool is_name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == ':' || c == '_' ||
               c == '-' || c == '.' || static_cast<unsigned char>(c) >= 0x80;
    }

    std::string parse_name() {
        std::size_t start = pos_;
        while (!eof() && is_name_char(peek())) ++pos_;
        if (pos_ == start) fail("expected name");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string decode_entities(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size();) {
            if (raw[i] != '&') {
                out.push_back(raw[i++]);
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string_view::npos || semi - i > 10) {
                out.push_back(raw[i++]);  // bare ampersand, pass through
                continue;
            }
            std::string_view ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out.push_back('&');
            else if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else if (!ent.empty() && ent[0] == '#') {
                std::uint32_t cp = 0;
                bool ok = true;
                if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')) {
                    for (std::size_t k = 2; k < ent.size(); ++k) {
                        char c = ent[k];
                        int d = (c >= '0' && c <= '9')   ? c - '0'
                                : (c >= 'a' && c <= 'f') ? c - 'a' + 10
                                : (c >= 'A' && c <= 'F') ? c - 'A' + 10
                                                         : -1;
                        if (d < 0) { ok = false; break; }
                        cp = cp * 16 + static_cast<std::uint32_t>(d);
                    }
                    ok = ok && ent.size() > 2;
                } else {
                    for (std::size_t k = 1; k < ent.size(); ++k) {
                        if (!std::isdigit(static_cast<unsigned char>(ent[k]))) { ok = false; break; }
                        cp = cp * 10 + static_cast<std::uint32_t>(ent[k] - '0');
                    }
                    ok = ok && ent.size() > 1;
                }
                if (ok && cp > 0 && cp <= 0x10FFFF) strings::append_utf8(out, cp);
            }
            // unknown named entities are dropped
            i = semi + 1;
        }
        return out;
    }

    void parse_attributes(Element& el) {
        while (true) {
            skip_ws();
            if (eof()) fail("unterminated start tag");
            if (peek() == '>' || looking_at("/>")) return;
            std::string name = parse_name();
            skip_ws();
            if (eof() || peek() != '=') fail("expected '=' in attribute");
            ++pos_;
            skip_ws();
            if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
            char quote = peek();
            ++pos_;
            auto close = s_.find(quote, pos_);
            if (close == std::string_view::npos) fail("unterminated attribute value");
            el.attributes.emplace_back(std::move(name),
                                       decode_entities(s_.substr(pos_, close - pos_)));
            pos_ = close + 1;
        }
    }

    std::unique_ptr<Element> parse_element() {
        if (eof() || peek() != '<') fail("expected element");
        ++pos_;
        auto el = std::make_unique<Element>();
        el->name = parse_name();
        parse_attributes(*el);
        if (looking_at("/>")) {
            pos_ += 2;
            el->texts.emplace_back();
            return el;
        }
        if (peek() != '>') fail("malformed start tag");
        ++pos_;

        std::string pending_text;
        while (true) {
            if (eof()) fail("unterminated element <" + el->name + ">");
            if (looking_at("</")) {
                pos_ += 2;
                std::string close_name = parse_name();
                if (close_name != el->name)
                    fail("mismatched end tag </" + close_name + "> for <" + el->name + ">");
                skip_ws();
                if (eof() || peek() != '>') fail("malformed end tag");
                ++pos_;
                el->texts.push_back(decode_entities(pending_text));
                return el;
            }
            if (looking_at("<!--")) {
                skip_until("-->", "comment");
                continue;
            }
            if (looking_at("<![CDATA[")) {
                pos_ += 9;
                auto close = s_.find("]]>", pos_);
                if (close == std::string_view::npos) fail("unterminated CDATA");
                pending_text.append(s_.substr(pos_, close - pos_));
                pos_ = close + 3;
                continue;
            }
            if (looking_at("<?")) {
                skip_until("?>", "processing instruction");
                continue;
            }
            if (peek() == '<') {
                el->texts.push_back(decode_entities(pending_text));
                pending_text.clear();
                el->children.push_back(parse_element());
                continue;
            }
            pending_text.push_back(peek());
            ++pos_;
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

void append_piece(std::string& out, std::string_view piece) {
    if (piece.empty()) return;
    bool out_spaced = out.empty() || std::isspace(static_cast<unsigned char>(out.back()));
    bool piece_spaced = std::isspace(static_cast<unsigned char>(piece.front()));
    if (!out.empty() && !out_spaced && !piece_spaced) out.push_back(' ');
    out += piece;
}

void collect_text(const Element& el, std::string& out) {
    for (std::size_t i = 0; i < el.texts.size(); ++i) {
        append_piece(out, el.texts[i]);
        if (i < el.children.size()) collect_text(*el.children[i], out);
    }
}

}  // namespace

std::string Element::local_name() const {
    auto colon = name.rfind(':');
    return colon == std::string::npos ? name : name.substr(colon + 1);
}

std::string Element::text_content() const {
    std::string out;
    collect_text(*this, out);
    return out;
}

std::unique_ptr<Element> parse(std::string_view text) {
    return Parser(text).parse_document();
}

const Element* find_first(const Element& root, std::string_view name) {
    if (root.name == name || root.local_name() == name) return &root;
    for (const auto& child : root.children) {
        if (const Element* found = find_first(*child, name)) return found;
    }
    return nullptr;
}

}  // namespace litscape::xml
