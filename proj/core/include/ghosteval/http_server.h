// HTTP/JSON front end of the annotation service.
//
//   GET  /api/task?annotator=TOKEN      -> {"task": payload | null}
//   POST /api/submit                     -> ack
//   GET  /api/progress[?annotator=TOKEN] -> {"total", "submitted"}
//   GET  /api/export?token=ADMIN[&task=] -> JSONL
//
// Tokens may also be sent as "Authorization: Bearer TOKEN". Errors are
// {"error": {"kind", "message"[, "lines"]}} with status 400/401/403/404/422.

#ifndef GHOSTEVAL_HTTP_SERVER_H_
#define GHOSTEVAL_HTTP_SERVER_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "ghosteval/service.h"

namespace ghosteval {

struct HttpOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> ui_dir;
};

class HttpServer {
 public:
  HttpServer(AnnotationService& service, HttpOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket and returns the bound port. Throws Error(kInternal) on
  /// failure.
  int bind();
  /// Serves until stop() is called. Binds first if needed.
  void listen();
  /// Blocks until listen() is accepting connections.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ghosteval

#endif  // GHOSTEVAL_HTTP_SERVER_H_
