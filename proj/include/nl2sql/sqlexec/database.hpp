#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>

#include "nl2sql/sql/dialect.hpp"
#include "nl2sql/sqlexec/result_table.hpp"

struct sqlite3;

namespace nl2sql::sqlexec {

enum class Engine { sqlite };

/// "sqlite:<path>", "sqlite::memory:" or a bare path (implies sqlite).
struct ConnectionSpec {
  Engine engine = Engine::sqlite;
  std::string path;

  static ConnectionSpec parse(std::string_view spec);
  std::string to_string() const;
};

/// evaluation: read-only connection, mutating statements rejected before they
/// reach the engine. sandbox: read-write, anything goes.
enum class ExecMode { evaluation, sandbox };

struct ExecOptions {
  std::size_t row_limit = 1000;
  std::chrono::milliseconds timeout{10000};
  ExecMode mode = ExecMode::evaluation;
  sql::Dialect dialect = sql::Dialect::sqlite;
};

/// One engine connection. Not shareable across threads; open one per task.
class Connection {
 public:
  /// Throws DbConnectionError when the database cannot be opened.
  Connection(const ConnectionSpec& spec, ExecMode mode);
  ~Connection();
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;
  Connection(Connection&& other) noexcept;
  Connection& operator=(Connection&& other) noexcept;

  /// Runs one statement. Throws GuardrailError, TimeoutError or
  /// ExecutionError (with the engine's message).
  ResultTable execute(std::string_view sql, const ExecOptions& options);

  /// Runs a multi-statement script (sandbox connections only).
  void execute_script(std::string_view script);

  ExecMode mode() const noexcept { return mode_; }

 private:
  sqlite3* db_ = nullptr;
  ExecMode mode_;
};

/// Opens a connection for one call.
ResultTable execute_sql(std::string_view sql, const ConnectionSpec& spec, const ExecOptions& options = {});

/// Verifies the database can be opened in `mode`; throws DbConnectionError.
void probe(const ConnectionSpec& spec, ExecMode mode);

/// Creates a fresh database file at `db_path` (replacing any existing one)
/// and applies the seed script (DDL + INSERTs).
void apply_seed(std::string_view script, const std::filesystem::path& db_path);

}  // namespace nl2sql::sqlexec
