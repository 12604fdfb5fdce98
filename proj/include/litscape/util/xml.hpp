#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace litscape::xml {

struct XmlError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Minimal XML element tree; enough for publisher full-text documents.
// Attributes are kept verbatim, entities in text are resolved
// (&amp; &lt; &gt; &quot; &apos; and numeric references).
struct Element {
    std::string name;                 // qualified name, e.g. "ce:sections"
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<std::unique_ptr<Element>> children;
    std::vector<std::string> texts;   // interleaved: texts[i] precedes children[i]

    std::string local_name() const;   // name without namespace prefix

    // Concatenated text content of this subtree in document order,
    // elements separated by single spaces.
    std::string text_content() const;
};

// Parses a complete document; throws XmlError on malformed input.
std::unique_ptr<Element> parse(std::string_view text);

// First element (document order) whose qualified or local name equals
// `name`; nullptr if absent.
const Element* find_first(const Element& root, std::string_view name);

}  // namespace litscape::xml
