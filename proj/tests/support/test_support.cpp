#include "test_support.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <sqlite3.h>
#include <unistd.h>

#include "nl2sql/app/demo.hpp"
#include "nl2sql/sql/parser.hpp"

namespace nl2sql::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("nl2sql-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path seed_shop(const std::filesystem::path& dir) {
  const auto db = dir / "shop.db";
  sqlexec::apply_seed(app::demo_asset("shop.sql"), db);
  return db;
}

sqlexec::ConnectionSpec sqlite_spec(const std::filesystem::path& db) {
  return {sqlexec::Engine::sqlite, db.string()};
}

OracleResult oracle_run(const std::filesystem::path& db, const std::string& sql) {
  sqlite3* conn = nullptr;
  if (sqlite3_open_v2(db.c_str(), &conn, SQLITE_OPEN_READONLY, nullptr) != SQLITE_OK) {
    std::string msg = conn ? sqlite3_errmsg(conn) : "open failed";
    sqlite3_close(conn);
    throw std::runtime_error(msg);
  }
  sqlite3_stmt* stmt = nullptr;
  if (sqlite3_prepare_v2(conn, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
    std::string msg = sqlite3_errmsg(conn);
    sqlite3_close(conn);
    throw std::runtime_error(msg);
  }
  OracleResult result;
  result.columns = static_cast<std::size_t>(sqlite3_column_count(stmt));
  auto& rows = result.rows;
  int rc;
  while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
    std::vector<OracleCell> row;
    for (int c = 0; c < sqlite3_column_count(stmt); ++c) {
      OracleCell cell;
      switch (sqlite3_column_type(stmt, c)) {
        case SQLITE_NULL: break;
        case SQLITE_INTEGER:
          cell.kind = OracleCell::number;
          cell.number_value = static_cast<long double>(sqlite3_column_int64(stmt, c));
          break;
        case SQLITE_FLOAT:
          cell.kind = OracleCell::number;
          cell.number_value = sqlite3_column_double(stmt, c);
          break;
        default: {
          cell.kind = OracleCell::text;
          const auto* p = static_cast<const char*>(sqlite3_column_blob(stmt, c));
          cell.text_value.assign(p ? p : "", static_cast<std::size_t>(sqlite3_column_bytes(stmt, c)));
        }
      }
      row.push_back(std::move(cell));
    }
    rows.push_back(std::move(row));
  }
  std::string msg = rc == SQLITE_DONE ? "" : sqlite3_errmsg(conn);
  sqlite3_finalize(stmt);
  sqlite3_close(conn);
  if (!msg.empty()) throw std::runtime_error(msg);
  return result;
}

bool oracle_equivalent(const std::filesystem::path& db, const std::string& a, const std::string& b, bool ordered) {
  auto ra = oracle_run(db, a);
  auto rb = oracle_run(db, b);
  if (ra.columns != rb.columns) return false;
  if (!ordered) {
    std::sort(ra.rows.begin(), ra.rows.end());
    std::sort(rb.rows.begin(), rb.rows.end());
  }
  return ra.rows == rb.rows;
}

std::string rewrite_sql(const std::string& sql, std::mt19937_64& rng, sql::Dialect dialect) {
  const auto parsed = sql::parse_statement(sql, dialect);
  static const char* kGaps[] = {" ", "  ", "\n", "\t", " \n  ", " /* note */ ", "\n-- aside\n"};
  auto coin = [&](int percent) { return static_cast<int>(rng() % 100) < percent; };
  std::string out;
  for (std::size_t i = 0; i < parsed.tokens.size(); ++i) {
    const auto& tok = parsed.tokens[i];
    if (i > 0 && tok.space_before) out += kGaps[rng() % std::size(kGaps)];
    if (parsed.keyword[i]) {
      for (char c : tok.text) {
        const auto u = static_cast<unsigned char>(c);
        out += static_cast<char>(coin(50) ? std::toupper(u) : std::tolower(u));
      }
    } else {
      out += tok.text;
    }
  }
  if (coin(30)) out = "  " + out;
  if (coin(40)) out += ";";
  if (coin(30)) out += " -- trailing remark";
  if (coin(30)) out += "\n";
  return out;
}

const std::vector<std::string>& shop_queries() {
  static const std::vector<std::string> queries = {
      "SELECT * FROM products",
      "SELECT name, unit_price FROM products WHERE unit_price > 50",
      "SELECT category, COUNT(*) FROM products GROUP BY category",
      "SELECT category, AVG(unit_price) AS avg_price FROM products GROUP BY category ORDER BY avg_price DESC",
      "SELECT name FROM products ORDER BY unit_price DESC, name LIMIT 5",
      "SELECT region, COUNT(*) FROM customers GROUP BY region",
      "SELECT name FROM customers WHERE region IS NULL",
      "SELECT c.name, COUNT(o.order_id) FROM customers c LEFT JOIN orders o ON o.customer_id = c.customer_id GROUP BY c.name",
      "SELECT status, COUNT(*) FROM orders GROUP BY status",
      "SELECT order_id, order_date FROM orders WHERE order_date BETWEEN '2024-01-01' AND '2024-03-31' ORDER BY order_date, order_id",
      "SELECT COUNT(*) FROM orders WHERE status = 'completed'",
      "SELECT o.order_id, SUM(oi.quantity * oi.unit_price) AS total FROM orders o JOIN order_items oi ON oi.order_id = o.order_id GROUP BY o.order_id",
      "SELECT p.name, SUM(oi.quantity) AS units FROM order_items oi JOIN products p ON p.product_id = oi.product_id GROUP BY p.name ORDER BY units DESC, p.name",
      "SELECT p.category, SUM(oi.quantity * oi.unit_price) FROM order_items oi JOIN products p ON p.product_id = oi.product_id JOIN orders o ON o.order_id = oi.order_id WHERE o.status = 'completed' GROUP BY p.category",
      "SELECT name, country FROM competitors ORDER BY name",
      "SELECT c.name, SUM(cs.units_sold) FROM competitor_sales cs JOIN competitors c ON c.competitor_id = cs.competitor_id GROUP BY c.name",
      "SELECT product_name, month, units_sold FROM competitor_sales WHERE units_sold > 200",
      "SELECT month, SUM(units_sold) FROM competitor_sales GROUP BY month ORDER BY month",
      "SELECT product_id FROM monthly_sales WHERE month = '2024-03' AND sales >= 100",
      "SELECT product_id, SUM(sales) FROM monthly_sales GROUP BY product_id HAVING SUM(sales) > 800",
      "SELECT month, MAX(sales), MIN(sales) FROM monthly_sales GROUP BY month",
      "SELECT DISTINCT category FROM products",
      "SELECT name FROM products WHERE category IN ('footwear', 'outerwear')",
      "SELECT name FROM products WHERE name LIKE '%Boot%'",
      "SELECT COUNT(DISTINCT customer_id) FROM orders",
      "SELECT name FROM products p WHERE EXISTS (SELECT 1 FROM order_items oi WHERE oi.product_id = p.product_id AND oi.quantity >= 5)",
      "SELECT name FROM products WHERE product_id NOT IN (SELECT product_id FROM order_items)",
      "WITH totals AS (SELECT product_id, SUM(quantity) AS q FROM order_items GROUP BY product_id) SELECT p.name, t.q FROM totals t JOIN products p ON p.product_id = t.product_id",
      "SELECT CASE WHEN unit_price >= 100 THEN 'premium' ELSE 'standard' END AS tier, COUNT(*) FROM products GROUP BY tier",
      "SELECT substr(order_date, 1, 7) AS month, COUNT(*) FROM orders GROUP BY month",
      "SELECT name, ROUND(unit_price * 1.2, 2) FROM products",
      "SELECT customer_id, MAX(order_date) FROM orders GROUP BY customer_id",
      "SELECT o.status, SUM(oi.quantity) FROM orders o JOIN order_items oi ON oi.order_id = o.order_id GROUP BY o.status",
      "SELECT product_name FROM competitor_sales WHERE category = 'footwear' UNION SELECT name FROM products WHERE category = 'footwear'",
      "SELECT name, RANK() OVER (ORDER BY unit_price DESC) AS r FROM products",
      "SELECT COUNT(*) FROM order_items WHERE quantity BETWEEN 2 AND 4",
      "SELECT AVG(quantity) FROM order_items",
      "SELECT month, sales FROM monthly_sales WHERE product_id = 3 ORDER BY month",
      "SELECT COALESCE(region, 'unassigned'), COUNT(*) FROM customers GROUP BY 1",
      "SELECT p.name FROM products p JOIN monthly_sales m ON m.product_id = p.product_id WHERE m.month = '2024-06' AND m.sales < 80",
  };
  return queries;
}

const std::vector<LabeledPair>& exe_pairs() {
  static const std::vector<LabeledPair> pairs = {
      {"SELECT product_id FROM monthly_sales WHERE sales >= 100",
       "SELECT product_id FROM monthly_sales WHERE sales > 99",
       true, false},
      {"SELECT product_id FROM monthly_sales WHERE sales > 100",
       "SELECT product_id FROM monthly_sales WHERE sales >= 100",
       false, false},
      {"SELECT product_id, month FROM monthly_sales WHERE sales < 100",
       "SELECT product_id, month FROM monthly_sales WHERE sales <= 99",
       true, false},
      {"SELECT name FROM products WHERE unit_price > 50",
       "SELECT name FROM products WHERE NOT unit_price <= 50",
       true, false},
      {"SELECT name FROM products WHERE unit_price > 50",
       "SELECT name FROM products WHERE unit_price >= 50",
       true, false},
      {"SELECT name FROM products WHERE unit_price > 55",
       "SELECT name FROM products WHERE unit_price >= 55",
       false, false},
      {"SELECT name FROM products ORDER BY unit_price DESC",
       "SELECT name FROM products ORDER BY unit_price ASC",
       false, true},
      {"SELECT name FROM products ORDER BY unit_price DESC",
       "SELECT name FROM products",
       true, false},
      {"SELECT name FROM products ORDER BY product_id",
       "SELECT name FROM products ORDER BY name",
       false, true},
      {"SELECT category, COUNT(*) FROM products GROUP BY category",
       "SELECT category, COUNT(product_id) FROM products GROUP BY category",
       true, false},
      {"SELECT category, COUNT(*) FROM products GROUP BY category",
       "SELECT COUNT(*), category FROM products GROUP BY category",
       false, false},
      {"SELECT COUNT(*) FROM customers WHERE region IS NULL",
       "SELECT COUNT(*) FROM customers WHERE region = NULL",
       false, false},
      {"SELECT COUNT(region) FROM customers",
       "SELECT COUNT(*) FROM customers",
       false, false},
      {"SELECT COUNT(*) FROM customers WHERE region IS NOT NULL",
       "SELECT COUNT(region) FROM customers",
       true, false},
      {"SELECT name FROM customers WHERE region IN ('north', 'south')",
       "SELECT name FROM customers WHERE region = 'north' OR region = 'south'",
       true, false},
      {"SELECT name FROM customers WHERE region NOT IN ('north', 'south')",
       "SELECT name FROM customers WHERE region <> 'north' AND region <> 'south'",
       true, false},
      {"SELECT name FROM customers WHERE region NOT IN ('north')",
       "SELECT name FROM customers WHERE NOT (region IS 'north')",
       false, false},
      {"SELECT DISTINCT customer_id FROM orders",
       "SELECT customer_id FROM orders GROUP BY customer_id",
       true, false},
      {"SELECT customer_id FROM orders",
       "SELECT DISTINCT customer_id FROM orders",
       false, false},
      {"SELECT o.order_id FROM orders o JOIN customers c ON c.customer_id = o.customer_id WHERE c.region = 'east'",
       "SELECT order_id FROM orders WHERE customer_id IN (SELECT customer_id FROM customers WHERE region = 'east')",
       true, false},
      {"SELECT c.name, COUNT(o.order_id) FROM customers c LEFT JOIN orders o ON o.customer_id = c.customer_id GROUP BY c.customer_id",
       "SELECT c.name, COUNT(*) FROM customers c LEFT JOIN orders o ON o.customer_id = c.customer_id GROUP BY c.customer_id",
       true, false},
      {"SELECT SUM(quantity * unit_price) FROM order_items",
       "SELECT SUM(unit_price * quantity) FROM order_items",
       true, false},
      {"SELECT SUM(oi.quantity * oi.unit_price) FROM order_items oi JOIN orders o ON o.order_id = oi.order_id WHERE o.status = 'completed'",
       "SELECT SUM(oi.quantity * oi.unit_price) FROM order_items oi JOIN orders o ON o.order_id = oi.order_id",
       false, false},
      {"SELECT MAX(unit_price) FROM products",
       "SELECT unit_price FROM products ORDER BY unit_price DESC LIMIT 1",
       true, false},
      {"SELECT MIN(unit_price) FROM products",
       "SELECT unit_price FROM products ORDER BY unit_price DESC LIMIT 1",
       false, false},
      {"SELECT name FROM products WHERE name LIKE '%boot%'",
       "SELECT name FROM products WHERE lower(name) LIKE '%boot%'",
       true, false},
      {"SELECT name FROM products WHERE name GLOB '*boot*'",
       "SELECT name FROM products WHERE name LIKE '%boot%'",
       false, false},
      {"SELECT order_id FROM orders WHERE order_date BETWEEN '2024-01-01' AND '2024-03-31'",
       "SELECT order_id FROM orders WHERE order_date >= '2024-01-01' AND order_date <= '2024-03-31'",
       true, false},
      {"SELECT order_id FROM orders WHERE order_date BETWEEN '2024-01-01' AND '2024-03-31'",
       "SELECT order_id FROM orders WHERE substr(order_date, 1, 7) BETWEEN '2024-01' AND '2024-03'",
       true, false},
      {"SELECT order_id FROM orders WHERE order_date < '2024-03-31'",
       "SELECT order_id FROM orders WHERE order_date <= '2024-03-31'",
       true, false},
      {"SELECT product_id, SUM(sales) FROM monthly_sales GROUP BY product_id HAVING SUM(sales) > 800",
       "SELECT product_id, total FROM (SELECT product_id, SUM(sales) AS total FROM monthly_sales GROUP BY product_id) WHERE total > 800",
       true, false},
      {"SELECT AVG(unit_price) FROM products",
       "SELECT SUM(unit_price) / COUNT(*) FROM products",
       true, false},
      {"SELECT AVG(quantity) FROM order_items",
       "SELECT SUM(quantity) / COUNT(*) FROM order_items",
       false, false},
      {"SELECT name FROM competitors ORDER BY name",
       "SELECT name FROM competitors ORDER BY competitor_id",
       false, true},
      {"SELECT name, country FROM competitors ORDER BY name",
       "SELECT name, country FROM competitors ORDER BY name ASC",
       true, true},
      {"SELECT product_name FROM competitor_sales WHERE category = 'footwear' UNION SELECT name FROM products WHERE category = 'footwear'",
       "SELECT product_name FROM competitor_sales WHERE category = 'footwear' UNION ALL SELECT name FROM products WHERE category = 'footwear'",
       false, false},
      {"SELECT name FROM products p WHERE NOT EXISTS (SELECT 1 FROM order_items oi WHERE oi.product_id = p.product_id)",
       "SELECT name FROM products WHERE product_id NOT IN (SELECT product_id FROM order_items)",
       true, false},
      {"SELECT 1",
       "SELECT 1.0",
       true, false},
      {"SELECT '1'",
       "SELECT 1",
       false, false},
  };
  return pairs;
}

std::vector<workflow::TaskNode> random_dag(std::mt19937_64& rng, std::size_t max_nodes) {
  const std::size_t n = 1 + rng() % max_nodes;
  std::vector<workflow::TaskNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].task_id = "n" + std::to_string(i);
    nodes[i].instruction = "step " + std::to_string(i);
    for (std::size_t j = 0; j < i; ++j) {
      if (rng() % 3 == 0) nodes[i].depends_on.push_back(nodes[j].task_id);
    }
  }
  std::shuffle(nodes.begin(), nodes.end(), rng);
  return nodes;
}

std::string check_schedule(const std::vector<workflow::TaskNode>& plan, const std::vector<workflow::TaskNode>& final_tasks,
                           const std::vector<workflow::TraceEvent>& events, std::size_t parallelism) {
  std::map<std::string, const workflow::TaskNode*> by_id;
  for (const auto& t : plan) by_id[t.task_id] = &t;
  std::map<std::string, std::string> terminal;
  std::set<std::string> started;
  std::size_t running = 0;
  for (const auto& e : events) {
    if (e.event == "start") {
      if (!started.insert(e.task_id).second) return "task " + e.task_id + " started twice";
      for (const auto& dep : by_id.at(e.task_id)->depends_on) {
        auto it = terminal.find(dep);
        if (it == terminal.end() || it->second != "done") return "task " + e.task_id + " started before " + dep + " was done";
      }
      if (++running > parallelism) return "more than " + std::to_string(parallelism) + " tasks running";
    } else if (e.event == "done" || e.event == "failed" || e.event == "skipped") {
      if (terminal.count(e.task_id)) return "task " + e.task_id + " finished twice";
      if (e.event != "skipped") {
        if (!started.count(e.task_id)) return "task " + e.task_id + " finished without starting";
        --running;
      } else if (started.count(e.task_id)) {
        return "task " + e.task_id + " skipped after starting";
      }
      terminal[e.task_id] = e.event;
    }
  }
  if (terminal.size() != plan.size()) return "only " + std::to_string(terminal.size()) + " of " + std::to_string(plan.size()) + " tasks finished";
  for (const auto& t : plan) {
    bool dep_unfinished = false;
    for (const auto& dep : t.depends_on) dep_unfinished |= terminal.at(dep) != "done";
    if ((terminal.at(t.task_id) == "skipped") != dep_unfinished) return "task " + t.task_id + " skip status is wrong";
  }
  for (const auto& t : final_tasks) {
    const auto& ev = terminal.at(t.task_id);
    const bool want_done = ev == "done";
    if ((t.state == workflow::TaskState::done) != want_done ||
        (!want_done && t.state != workflow::TaskState::failed)) {
      return "final state of " + t.task_id + " disagrees with the trace";
    }
  }
  return {};
}

std::optional<bool> oracle_verdict(std::string_view reply) {
  static const std::regex line_re(R"(^[ \t>*#_`-]*verdict[ \t*_`]*:[ \t*_`]*(in)?consistent(?![A-Za-z0-9_]))",
                                  std::regex::ECMAScript | std::regex::icase);
  std::optional<bool> found;
  std::size_t start = 0;
  while (start <= reply.size()) {
    auto end = reply.find('\n', start);
    if (end == std::string_view::npos) end = reply.size();
    std::string line(reply.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_search(line, m, line_re)) found = !m[1].matched;
    start = end + 1;
  }
  return found;
}

std::string random_judge_reply(std::mt19937_64& rng) {
  static const char* kFragments[] = {
      "VERDICT: CONSISTENT", "VERDICT: INCONSISTENT", "verdict:consistent", "Verdict : Inconsistent",
      "**VERDICT:** CONSISTENT", "> VERDICT: `CONSISTENT`", "VERDICT CONSISTENT", "VERDICT: CONSISTENTLY",
      "VERDICT: CONSISTENT_X", "VERDICT: CONSIST", "VERDICT:", "consistent", "inconsistent", "VERDICT - CONSISTENT",
      "## VERDICT: INCONSISTENT.", "The SQL looks right.", "not consistent", "\xe2\x80\x94", "VERDICT: \u00e9",
      "- VERDICT: CONSISTENT -- fine", "\tverdict:\tINCONSISTENT\t", "VERDICT:: CONSISTENT", "xVERDICT: CONSISTENT",
  };
  std::string out;
  const int parts = static_cast<int>(rng() % 8);
  for (int i = 0; i < parts; ++i) {
    switch (rng() % 5) {
      case 0:
        out += kFragments[rng() % std::size(kFragments)];
        break;
      case 1: {
        const int n = static_cast<int>(rng() % 20);
        for (int j = 0; j < n; ++j) out += static_cast<char>(rng() % 256);
        break;
      }
      case 2: {
        const int n = static_cast<int>(rng() % 30);
        for (int j = 0; j < n; ++j) out += static_cast<char>(32 + rng() % 95);
        break;
      }
      case 3:
        out += (rng() % 2) ? "\n" : "\r\n";
        break;
      default: {
        // Mutate a fragment by flipping case and dropping a character.
        std::string f = kFragments[rng() % std::size(kFragments)];
        for (auto& ch : f)
          if (rng() % 3 == 0) ch = static_cast<char>(std::islower(static_cast<unsigned char>(ch)) ? std::toupper(ch) : std::tolower(ch));
        if (!f.empty() && rng() % 2) f.erase(rng() % f.size(), 1);
        out += f;
        break;
      }
    }
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nl2sql::testing
