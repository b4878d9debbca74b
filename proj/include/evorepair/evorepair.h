/* Copyright 2026 The evorepair Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of libevorepair.
 *
 * A session wraps one subject and one set of run options. Stage calls
 * write their artifacts under <out>/<subject id>/ and return a status.
 * Strings handed out by the library are owned by the caller and released
 * with er_string_free, except er_last_error and er_version, which stay
 * owned by the library. er_last_error is per thread.
 */

#ifndef EVOREPAIR_H
#define EVOREPAIR_H

#include <stddef.h>

#if defined(EVOREPAIR_BUILDING)
#define ER_API __attribute__((visibility("default")))
#else
#define ER_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct er_session er_session;

typedef enum er_status {
  ER_OK = 0,
  ER_NO_PLAUSIBLE = 1, /* repair found nothing, or validate saw a failing suite */
  ER_ERR_ARGUMENT = 2, /* null handle or argument */
  ER_ERR_CONFIG = 3,
  ER_ERR_PROVIDER = 4,
  ER_ERR_IO = 5,
  ER_ERR_PARSE = 6,
  ER_ERR_EVALUATION = 7,
  ER_ERR_INTERNAL = 8
} er_status;

ER_API const char* er_version(void);
ER_API const char* er_status_name(er_status status);
ER_API const char* er_last_error(void);
ER_API void er_string_free(char* s);

/* subject: a subject.json file or a directory holding one.
 * options_json: JSON object of run options (may be NULL); keys override
 * the subject's own "options", which override the defaults. */
ER_API er_status er_session_open(const char* subject, const char* options_json, er_session** out);
ER_API void er_session_close(er_session* session);

/* Directory the session writes to; owned by the session. */
ER_API const char* er_session_output_dir(const er_session* session);

/* Each count pointer may be NULL. */
ER_API er_status er_localize(er_session* session, size_t* lbs_count);
ER_API er_status er_prompts(er_session* session, size_t* prompt_count);
ER_API er_status er_candidates(er_session* session, size_t* candidate_count);
/* report_json receives the repair report (may be NULL). */
ER_API er_status er_repair(er_session* session, size_t* archive_size, char** report_json);
/* ER_OK when the full suite passes with the diff applied. */
ER_API er_status er_validate(er_session* session, const char* diff_path);

/* Benchmark over every subject directory of corpus_dir. */
ER_API er_status er_bench(const char* corpus_dir, const char* options_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* EVOREPAIR_H */
