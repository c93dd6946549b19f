#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cnctrans/accessor.hpp"
#include "cnctrans/adl.hpp"
#include "cnctrans/ast.hpp"
#include "cnctrans/error.hpp"
#include "cnctrans/grammar.hpp"
#include "cnctrans/modexec.hpp"
#include "cnctrans/rule.hpp"

namespace cnctrans {

/// A base language together with its derived transformation language.
///
/// For the shipped CnC grammar, models are normalized after parsing and
/// checked by adl::check_wellformed; other grammars only parse.
class Language {
public:
    explicit Language(GrammarSpec grammar);

    /// The shipped CnC language (shared instance).
    static std::shared_ptr<const Language> cnc();
    /// Loads a `.mcg` grammar; returns the CnC language when the text defines
    /// the same grammar.
    static std::shared_ptr<const Language> from_grammar_text(std::string_view text, const std::string& file_name);

    const GrammarSpec& grammar() const noexcept { return table_.grammar(); }
    const GrammarSpec& dstl() const noexcept { return dstl_; }
    const AccessorTable& table() const noexcept { return table_; }
    bool is_cnc() const noexcept { return is_cnc_; }

    NodePtr parse(std::string_view text, const std::string& file_name) const;
    std::vector<adl::Diagnostic> check(const NodePtr& model, bool strict) const;
    std::string print(const AstNode& model) const;
    TransformationModule load_module(std::string_view text, const std::string& file_name) const;

private:
    Language(AccessorTable table, bool is_cnc);

    AccessorTable table_;
    GrammarSpec dstl_;
    bool is_cnc_ = false;
};

/// Joins models parsed from several files into one root: the list fields of
/// the first root receive the items of the others.
NodePtr merge_models(const std::vector<NodePtr>& roots);

/// Splits a merged model back into one root per file. Top-level items go to
/// the file of their span; items without a span follow the previous item
/// (or go to the first file). Roots left without items are null.
std::vector<NodePtr> split_models(const NodePtr& merged, const std::vector<NodePtr>& originals,
                                  const std::vector<std::string>& file_names);

/// Process exit code for an error kind: 1 syntax/grammar/compile,
/// 3 transformation and derivation errors, 4 I/O.
int exit_code(ErrorKind kind);
inline constexpr int kExitWellFormedness = 2;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace cnctrans
