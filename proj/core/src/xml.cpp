#include "delm/xml.hpp"

#include <cctype>
#include <sstream>

#include "delm/errors.hpp"

namespace delm::xml {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == ':';
}

bool all_space(std::string_view s) {
    for (char c : s) {
        if (!is_space(c)) return false;
    }
    return true;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Node parse_document() {
        skip_prolog_and_misc();
        if (eof()) throw MalformedXml("document has no root element");
        Node root = parse_element();
        skip_misc();
        if (!eof()) throw MalformedXml(err("trailing content after root element"));
        return root;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

    std::string err(const std::string& msg) const {
        return msg + " (offset " + std::to_string(pos_) + ")";
    }

    void skip_ws() {
        while (!eof() && is_space(peek())) ++pos_;
    }

    void skip_comment() {
        pos_ += 4;  // "<!--"
        std::size_t end = text_.find("-->", pos_);
        if (end == std::string_view::npos) throw MalformedXml("unterminated comment");
        pos_ = end + 3;
    }

    void skip_prolog_and_misc() {
        skip_ws();
        if (starts_with("<?xml")) {
            std::size_t end = text_.find("?>", pos_);
            if (end == std::string_view::npos) throw MalformedXml("unterminated xml declaration");
            pos_ = end + 2;
        }
        skip_misc();
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                skip_comment();
            } else {
                return;
            }
        }
    }

    std::string parse_name() {
        std::size_t start = pos_;
        while (!eof() && is_name_char(peek())) ++pos_;
        if (pos_ == start) throw MalformedXml(err("expected a name"));
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string decode_entities(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size();) {
            if (raw[i] != '&') {
                out += raw[i++];
                continue;
            }
            std::size_t semi = raw.find(';', i);
            if (semi == std::string_view::npos) throw MalformedXml("unterminated entity");
            std::string_view ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") {
                out += '&';
            } else if (ent == "lt") {
                out += '<';
            } else if (ent == "gt") {
                out += '>';
            } else if (ent == "quot") {
                out += '"';
            } else if (ent == "apos") {
                out += '\'';
            } else if (!ent.empty() && ent[0] == '#') {
                long code = 0;
                try {
                    code = (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                               ? std::stol(std::string(ent.substr(2)), nullptr, 16)
                               : std::stol(std::string(ent.substr(1)));
                } catch (const std::exception&) {
                    throw MalformedXml("bad numeric entity: " + std::string(ent));
                }
                if (code <= 0 || code > 0x10FFFF) {
                    throw MalformedXml("numeric entity out of range");
                }
                // UTF-8 encode.
                unsigned long cp = static_cast<unsigned long>(code);
                if (cp < 0x80) {
                    out += static_cast<char>(cp);
                } else if (cp < 0x800) {
                    out += static_cast<char>(0xC0 | (cp >> 6));
                    out += static_cast<char>(0x80 | (cp & 0x3F));
                } else if (cp < 0x10000) {
                    out += static_cast<char>(0xE0 | (cp >> 12));
                    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                    out += static_cast<char>(0x80 | (cp & 0x3F));
                } else {
                    out += static_cast<char>(0xF0 | (cp >> 18));
                    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
                    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                    out += static_cast<char>(0x80 | (cp & 0x3F));
                }
            } else {
                throw MalformedXml("unknown entity: &" + std::string(ent) + ";");
            }
            i = semi + 1;
        }
        return out;
    }

    Attr parse_attr() {
        Attr a;
        a.name = parse_name();
        skip_ws();
        if (eof() || peek() != '=') throw MalformedXml(err("expected '=' after attribute name"));
        ++pos_;
        skip_ws();
        if (eof() || (peek() != '"' && peek() != '\'')) {
            throw MalformedXml(err("expected quoted attribute value"));
        }
        char quote = peek();
        ++pos_;
        std::size_t end = text_.find(quote, pos_);
        if (end == std::string_view::npos) throw MalformedXml("unterminated attribute value");
        a.value = decode_entities(text_.substr(pos_, end - pos_));
        pos_ = end + 1;
        return a;
    }

    Node parse_element() {
        if (eof() || peek() != '<') throw MalformedXml(err("expected '<'"));
        ++pos_;
        Node node;
        node.name = parse_name();
        for (;;) {
            skip_ws();
            if (eof()) throw MalformedXml("unterminated start tag for <" + node.name + ">");
            if (peek() == '/') {
                ++pos_;
                if (eof() || peek() != '>') throw MalformedXml(err("expected '>' after '/'"));
                ++pos_;
                return node;  // self-closing
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            node.attributes.push_back(parse_attr());
        }
        parse_content(node);
        return node;
    }

    void parse_content(Node& node) {
        std::string text;
        for (;;) {
            if (eof()) throw MalformedXml("missing closing tag for <" + node.name + ">");
            if (peek() == '<') {
                if (starts_with("<!--")) {
                    skip_comment();
                    continue;
                }
                if (starts_with("</")) {
                    pos_ += 2;
                    std::string close = parse_name();
                    if (close != node.name) {
                        throw MalformedXml("mismatched closing tag: expected </" + node.name +
                                           ">, got </" + close + ">");
                    }
                    skip_ws();
                    if (eof() || peek() != '>') throw MalformedXml(err("expected '>'"));
                    ++pos_;
                    break;
                }
                node.children.push_back(parse_element());
            } else {
                std::size_t next = text_.find('<', pos_);
                if (next == std::string_view::npos) {
                    throw MalformedXml("missing closing tag for <" + node.name + ">");
                }
                text += decode_entities(text_.substr(pos_, next - pos_));
                pos_ = next;
            }
        }
        if (!node.children.empty()) {
            if (!all_space(text)) {
                throw MalformedXml("mixed text/element content in <" + node.name +
                                   "> is not supported");
            }
        } else {
            node.text = std::move(text);
        }
    }
};

void write_node(std::ostringstream& out, const Node& node, int depth) {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    out << indent << '<' << node.name;
    for (const auto& a : node.attributes) {
        out << ' ' << a.name << "=\"" << escape_attr(a.value) << '"';
    }
    if (node.children.empty() && node.text.empty()) {
        out << "/>\n";
        return;
    }
    if (node.children.empty()) {
        out << '>' << escape_text(node.text) << "</" << node.name << ">\n";
        return;
    }
    out << ">\n";
    for (const auto& child : node.children) {
        write_node(out, child, depth + 1);
    }
    out << indent << "</" << node.name << ">\n";
}

}  // namespace

const Attr* Node::find_attr(std::string_view attr_name) const {
    for (const auto& a : attributes) {
        if (a.name == attr_name) return &a;
    }
    return nullptr;
}

std::optional<std::string> Node::attr(std::string_view attr_name) const {
    const Attr* a = find_attr(attr_name);
    if (a == nullptr) return std::nullopt;
    return a->value;
}

void Node::set_attr(std::string_view attr_name, std::string_view value) {
    for (auto& a : attributes) {
        if (a.name == attr_name) {
            a.value = std::string(value);
            return;
        }
    }
    attributes.push_back({std::string(attr_name), std::string(value)});
}

Node parse(std::string_view text) {
    return Parser(text).parse_document();
}

std::string escape_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_attr(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string serialize(const Node& root) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
    write_node(out, root, 0);
    return out.str();
}

}  // namespace delm::xml
