#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nl2sql/sql/dialect.hpp"
#include "nl2sql/sqlexec/database.hpp"
#include "nl2sql/workflow/types.hpp"

namespace nl2sql::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Seeds the bundled trade database (7 tables) into `dir`/shop.db.
std::filesystem::path seed_shop(const std::filesystem::path& dir);

sqlexec::ConnectionSpec sqlite_spec(const std::filesystem::path& db);

/// One cell as materialized by the oracle: storage class tag plus value.
struct OracleCell {
  enum Kind { null, number, text } kind = null;
  long double number_value = 0;  // INTEGER and REAL alike
  std::string text_value;        // TEXT, or BLOB bytes

  bool operator==(const OracleCell&) const = default;
  auto operator<=>(const OracleCell&) const = default;
};

using OracleRows = std::vector<std::vector<OracleCell>>;

struct OracleResult {
  std::size_t columns = 0;
  OracleRows rows;
};

/// Runs `sql` with the raw SQLite C API and materializes every row. Throws
/// std::runtime_error with the engine message on failure.
OracleResult oracle_run(const std::filesystem::path& db, const std::string& sql);

/// Brute-force equivalence: equal column counts and equal row multisets
/// (or sequences when `ordered`).
bool oracle_equivalent(const std::filesystem::path& db, const std::string& a, const std::string& b, bool ordered);

/// Identity-preserving respelling of one statement: keyword case flips,
/// random whitespace and comments wherever the original had whitespace, an
/// optional trailing ';' and trailing line comment. Identifiers and literals
/// are untouched.
std::string rewrite_sql(const std::string& sql, std::mt19937_64& rng, sql::Dialect dialect = sql::Dialect::sqlite);

/// Read-only SELECT statements over the seeded trade database.
const std::vector<std::string>& shop_queries();

/// A generated/gold SQL pair over the trade database with its hand label.
/// `ordered` says whether row order is part of the expected answer (the
/// gold statement has a top-level ORDER BY).
struct LabeledPair {
  std::string gen;
  std::string gold;
  bool equivalent;
  bool ordered;
};

const std::vector<LabeledPair>& exe_pairs();

/// Random acyclic task graph with 1..max_nodes nodes; edges only point to
/// earlier tasks, declared in a shuffled plan order.
std::vector<workflow::TaskNode> random_dag(std::mt19937_64& rng, std::size_t max_nodes);

/// Checks a finished schedule against its trace. Returns an empty string when
/// sound, otherwise the first violation found:
///  - every task reaches exactly one terminal event (done, failed, skipped);
///  - no task starts before all of its dependencies are done;
///  - no more than `parallelism` tasks run at once;
///  - a task is skipped exactly when some dependency did not finish;
///  - final task states agree with the trace.
std::string check_schedule(const std::vector<workflow::TaskNode>& plan, const std::vector<workflow::TaskNode>& final_tasks,
                           const std::vector<workflow::TraceEvent>& events, std::size_t parallelism);

/// Regex restatement of the verdict-line grammar: the last line matching
/// it decides; empty when none does.
std::optional<bool> oracle_verdict(std::string_view reply);

/// Random judge-like replies: printable noise, control bytes, markdown and
/// near-miss or well-formed verdict lines mixed over several lines.
std::string random_judge_reply(std::mt19937_64& rng);

/// Reads a file under the source tree's fixtures directory.
std::string read_text(const std::filesystem::path& path);

}  // namespace nl2sql::testing
