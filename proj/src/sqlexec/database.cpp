#include "nl2sql/sqlexec/database.hpp"

#include <sqlite3.h>

#include <memory>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/text.hpp"
#include "nl2sql/sql/parser.hpp"

namespace nl2sql::sqlexec {

namespace {

using StmtPtr = std::unique_ptr<sqlite3_stmt, decltype(&sqlite3_finalize)>;

struct Deadline {
  std::chrono::steady_clock::time_point at;
  bool expired = false;
};

int progress_callback(void* arg) {
  auto* deadline = static_cast<Deadline*>(arg);
  if (std::chrono::steady_clock::now() >= deadline->at) {
    deadline->expired = true;
    return 1;
  }
  return 0;
}

std::string hex_blob(const void* data, int size) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::string out = "X'";
  for (int i = 0; i < size; ++i) {
    out.push_back(kHex[bytes[i] >> 4]);
    out.push_back(kHex[bytes[i] & 0xF]);
  }
  return out + "'";
}

}  // namespace

ConnectionSpec ConnectionSpec::parse(std::string_view spec) {
  const std::string_view trimmed = text::trim(spec);
  ConnectionSpec out;
  if (trimmed.rfind("sqlite:", 0) == 0) {
    out.path = std::string(trimmed.substr(7));
  } else if (trimmed.find("://") != std::string_view::npos) {
    throw ConfigError("unsupported engine in connection spec '" + std::string(trimmed) + "'");
  } else {
    out.path = std::string(trimmed);
  }
  if (out.path.empty()) throw ConfigError("connection spec has no database path");
  return out;
}

std::string ConnectionSpec::to_string() const { return "sqlite:" + path; }

Connection::Connection(const ConnectionSpec& spec, ExecMode mode) : mode_(mode) {
  int flags = SQLITE_OPEN_NOMUTEX;
  if (spec.path == ":memory:") {
    flags |= SQLITE_OPEN_READWRITE | SQLITE_OPEN_MEMORY;
  } else {
    flags |= mode == ExecMode::evaluation ? SQLITE_OPEN_READONLY : SQLITE_OPEN_READWRITE;
  }
  const int rc = sqlite3_open_v2(spec.path.c_str(), &db_, flags, nullptr);
  if (rc != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : sqlite3_errstr(rc);
    sqlite3_close(db_);
    db_ = nullptr;
    throw DbConnectionError("cannot open database '" + spec.path + "': " + msg);
  }
  sqlite3_busy_timeout(db_, 2000);
}

Connection::~Connection() {
  if (db_) sqlite3_close(db_);
}

Connection::Connection(Connection&& other) noexcept : db_(other.db_), mode_(other.mode_) { other.db_ = nullptr; }

Connection& Connection::operator=(Connection&& other) noexcept {
  if (this != &other) {
    if (db_) sqlite3_close(db_);
    db_ = other.db_;
    mode_ = other.mode_;
    other.db_ = nullptr;
  }
  return *this;
}

ResultTable Connection::execute(std::string_view sql, const ExecOptions& options) {
  std::optional<sql::StatementKind> kind;
  try {
    kind = sql::parse_statement(sql, options.dialect).kind;
  } catch (const SqlParseError&) {
    // Leave classification to the engine below; it reports its own syntax errors.
  }
  if (mode_ == ExecMode::evaluation && kind && !sql::is_read_only(*kind)) {
    throw GuardrailError("statement kind '" + std::string(sql::to_string(*kind)) +
                         "' is not permitted in evaluation mode");
  }

  sqlite3_stmt* raw = nullptr;
  const char* tail = nullptr;
  if (sqlite3_prepare_v2(db_, sql.data(), static_cast<int>(sql.size()), &raw, &tail) != SQLITE_OK) {
    throw ExecutionError(sqlite3_errmsg(db_));
  }
  StmtPtr stmt(raw, &sqlite3_finalize);
  if (!stmt) throw ExecutionError("empty statement");

  // Anything after the first statement must be whitespace or comments.
  const char* end = sql.data() + sql.size();
  while (tail && tail < end) {
    sqlite3_stmt* extra = nullptr;
    const char* next = nullptr;
    if (sqlite3_prepare_v2(db_, tail, static_cast<int>(end - tail), &extra, &next) != SQLITE_OK) {
      throw ExecutionError(std::string("trailing text after statement: ") + sqlite3_errmsg(db_));
    }
    if (extra) {
      sqlite3_finalize(extra);
      throw ExecutionError("multiple statements are not supported");
    }
    if (next == tail) break;
    tail = next;
  }

  if (mode_ == ExecMode::evaluation && !sqlite3_stmt_readonly(stmt.get())) {
    throw GuardrailError("mutating statement is not permitted in evaluation mode");
  }

  Deadline deadline{std::chrono::steady_clock::now() + options.timeout};
  sqlite3_progress_handler(db_, 1000, &progress_callback, &deadline);
  struct ClearHandler {
    sqlite3* db;
    ~ClearHandler() { sqlite3_progress_handler(db, 0, nullptr, nullptr); }
  } clear{db_};

  ResultTable table;
  table.row_limit = options.row_limit;
  const int ncols = sqlite3_column_count(stmt.get());
  for (int c = 0; c < ncols; ++c) {
    const char* name = sqlite3_column_name(stmt.get(), c);
    table.columns.emplace_back(name ? name : "");
  }

  while (true) {
    const int rc = sqlite3_step(stmt.get());
    if (rc == SQLITE_DONE) break;
    if (rc != SQLITE_ROW) {
      if (deadline.expired || rc == SQLITE_INTERRUPT) {
        throw TimeoutError("statement exceeded timeout of " + std::to_string(options.timeout.count()) + " ms");
      }
      throw ExecutionError(sqlite3_errmsg(db_));
    }
    if (table.rows.size() == options.row_limit) {
      table.truncated = true;
      break;
    }
    std::vector<Value> row;
    row.reserve(static_cast<std::size_t>(ncols));
    for (int c = 0; c < ncols; ++c) {
      switch (sqlite3_column_type(stmt.get(), c)) {
        case SQLITE_INTEGER: row.emplace_back(static_cast<std::int64_t>(sqlite3_column_int64(stmt.get(), c))); break;
        case SQLITE_FLOAT: row.emplace_back(sqlite3_column_double(stmt.get(), c)); break;
        case SQLITE_TEXT: {
          const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), c));
          row.emplace_back(std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt.get(), c))));
          break;
        }
        case SQLITE_BLOB:
          row.emplace_back(hex_blob(sqlite3_column_blob(stmt.get(), c), sqlite3_column_bytes(stmt.get(), c)));
          break;
        default: row.emplace_back(std::monostate{}); break;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void Connection::execute_script(std::string_view script) {
  if (mode_ != ExecMode::sandbox) throw GuardrailError("scripts require a sandbox connection");
  char* err = nullptr;
  const std::string owned(script);
  if (sqlite3_exec(db_, owned.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw ExecutionError("script failed: " + msg);
  }
}

ResultTable execute_sql(std::string_view sql, const ConnectionSpec& spec, const ExecOptions& options) {
  Connection conn(spec, options.mode);
  return conn.execute(sql, options);
}

void probe(const ConnectionSpec& spec, ExecMode mode) {
  Connection conn(spec, mode);
  ExecOptions options;
  options.mode = mode;
  options.row_limit = 1;
  try {
    conn.execute("SELECT count(*) FROM sqlite_master", options);
  } catch (const ExecutionError& e) {
    throw DbConnectionError("database '" + spec.path + "' is not usable: " + e.what());
  }
}

void apply_seed(std::string_view script, const std::filesystem::path& db_path) {
  std::error_code ec;
  if (db_path.has_parent_path()) std::filesystem::create_directories(db_path.parent_path(), ec);
  std::filesystem::remove(db_path, ec);
  sqlite3* db = nullptr;
  if (sqlite3_open_v2(db_path.string().c_str(), &db, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr) !=
      SQLITE_OK) {
    std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
    sqlite3_close(db);
    throw IoError("cannot create database '" + db_path.string() + "': " + msg);
  }
  char* err = nullptr;
  const std::string owned(script);
  const int rc = sqlite3_exec(db, owned.c_str(), nullptr, nullptr, &err);
  std::string msg = err ? err : "";
  sqlite3_free(err);
  sqlite3_close(db);
  if (rc != SQLITE_OK) throw ExecutionError("seed script failed: " + msg);
}

}  // namespace nl2sql::sqlexec
