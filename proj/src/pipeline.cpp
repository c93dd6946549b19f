#include "cnctrans/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "cnctrans/derive.hpp"
#include "cnctrans/parser.hpp"
#include "cnctrans/printer.hpp"

namespace cnctrans {

Language::Language(GrammarSpec grammar) : Language(AccessorTable(std::move(grammar)), false) {}

Language::Language(AccessorTable table, bool is_cnc)
    : table_(std::move(table)), dstl_(derive_transformation_grammar(table_.grammar())), is_cnc_(is_cnc) {}

std::shared_ptr<const Language> Language::cnc() {
    static const std::shared_ptr<const Language> language(new Language(adl::accessor_table(), true));
    return language;
}

std::shared_ptr<const Language> Language::from_grammar_text(std::string_view text, const std::string& file_name) {
    GrammarSpec grammar = parse_grammar(text, file_name);
    if (grammar == adl::cnc_grammar()) return cnc();
    return std::make_shared<const Language>(std::move(grammar));
}

NodePtr Language::parse(std::string_view text, const std::string& file_name) const {
    if (is_cnc_) return adl::parse(text, file_name);
    return parse_model(grammar(), grammar().start_symbol, text, file_name);
}

std::vector<adl::Diagnostic> Language::check(const NodePtr& model, bool strict) const {
    if (!is_cnc_) return {};
    return adl::check_wellformed(model, strict);
}

std::string Language::print(const AstNode& model) const { return pretty_print(grammar(), model); }

TransformationModule Language::load_module(std::string_view text, const std::string& file_name) const {
    return compile_module(parse_module(dstl_, text, file_name), table_);
}

NodePtr merge_models(const std::vector<NodePtr>& roots) {
    if (roots.empty()) throw Error(ErrorKind::Io, "no model given");
    if (roots.size() == 1) return roots.front();
    auto merged = std::make_shared<AstNode>(roots.front()->nonterminal(), roots.front()->span());
    merged->fields() = roots.front()->fields();
    for (std::size_t i = 1; i < roots.size(); ++i) {
        if (roots[i]->nonterminal() != merged->nonterminal()) {
            throw Error(ErrorKind::Syntax, "cannot combine a " + roots[i]->nonterminal() + " with a " +
                                               merged->nonterminal());
        }
        for (auto& [label, value] : merged->fields()) {
            auto* list = std::get_if<std::vector<Item>>(&value);
            const std::vector<Item>* more = roots[i]->list(label);
            if (list && more) list->insert(list->end(), more->begin(), more->end());
        }
    }
    return merged;
}

std::vector<NodePtr> split_models(const NodePtr& merged, const std::vector<NodePtr>& originals,
                                  const std::vector<std::string>& file_names) {
    if (file_names.size() <= 1) return {merged};
    std::vector<MutableNodePtr> parts;
    for (std::size_t k = 0; k < file_names.size(); ++k) {
        const NodePtr& base = k < originals.size() ? originals[k] : merged;
        auto part = std::make_shared<AstNode>(merged->nonterminal(), base->span());
        part->fields() = merged->fields();
        parts.push_back(part);
    }
    std::vector<bool> non_empty(file_names.size(), false);
    for (const auto& [label, value] : merged->fields()) {
        const auto* items = std::get_if<std::vector<Item>>(&value);
        if (!items) continue;
        std::vector<std::vector<Item>> per_file(file_names.size());
        std::size_t current = 0;
        for (const Item& item : *items) {
            if (const auto* node = std::get_if<NodePtr>(&item); node && (*node)->span()) {
                std::string file = (*node)->span()->file_name();
                for (std::size_t k = 0; k < file_names.size(); ++k) {
                    if (file_names[k] == file) current = k;
                }
            }
            per_file[current].push_back(item);
            non_empty[current] = true;
        }
        for (std::size_t k = 0; k < parts.size(); ++k) parts[k]->set(label, std::move(per_file[k]));
    }
    std::vector<NodePtr> out;
    for (std::size_t k = 0; k < parts.size(); ++k) out.push_back(non_empty[k] ? NodePtr(parts[k]) : nullptr);
    return out;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax:
        case ErrorKind::Grammar:
        case ErrorKind::Compile: return 1;
        case ErrorKind::Io: return 4;
        case ErrorKind::Collision:
        case ErrorKind::MalformedNode:
        case ErrorKind::Evaluation:
        case ErrorKind::CapExceeded:
        case ErrorKind::StaleMatch: return 3;
    }
    return 3;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out << content;
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
}

}  // namespace cnctrans
