#ifndef TEXGLYPH_H
#define TEXGLYPH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum TgStatus {
  TG_STATUS_OK = 0,
  TG_STATUS_NULL_ARGUMENT = 1,
  TG_STATUS_INVALID_UTF8 = 2,
  TG_STATUS_PARSE_ERROR = 3,
  TG_STATUS_SERIALIZE_ERROR = 4,
  TG_STATUS_LAYOUT_ERROR = 5,
  TG_STATUS_RENDER_ERROR = 6,
  TG_STATUS_OUT_OF_RANGE = 7,
  TG_STATUS_PANIC = 8,
} TgStatus;

/**
 * One interpreted page.
 */
typedef struct TgPage TgPage;

/**
 * A parsed DVI or XDV file.
 */
typedef struct TgProgram TgProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next texglyph call on the same thread.
 */
const char *tg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tg_version(void);

/**
 * Parses `len` bytes at `data`.
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` to writable storage.
 */
enum TgStatus tg_program_parse(const uint8_t *data, size_t len, struct TgProgram **out);

/**
 * Releases a program. Null is ignored.
 *
 * # Safety
 * `program` must come from [`tg_program_parse`] and not be used afterwards.
 */
void tg_program_free(struct TgProgram *program);

/**
 * Number of pages, or 0 for null.
 *
 * # Safety
 * `program` must be null or a live program handle.
 */
size_t tg_program_page_count(const struct TgProgram *program);

/**
 * Whether the program is XDV (1) or classic DVI (0); -1 for null.
 *
 * # Safety
 * `program` must be null or a live program handle.
 */
int tg_program_is_xdv(const struct TgProgram *program);

/**
 * Writes the disassembly listing to `*out`.
 *
 * # Safety
 * `program` must be a live handle and `out` writable.
 */
enum TgStatus tg_program_disassemble(const struct TgProgram *program, char **out);

/**
 * Re-encodes the program; `*out` receives `*out_len` bytes.
 *
 * # Safety
 * `program` must be a live handle; `out` and `out_len` writable.
 */
enum TgStatus tg_program_serialize(const struct TgProgram *program, uint8_t **out, size_t *out_len);

/**
 * Interprets page `index`. `font_dirs` is an optional PATH-style list of
 * directories searched for font files; null uses `TEXGLYPH_FONTDIRS`.
 *
 * # Safety
 * `program` must be a live handle, `font_dirs` null or a C string, `out`
 * writable.
 */
enum TgStatus tg_page_interpret(const struct TgProgram *program,
                                size_t index,
                                const char *font_dirs,
                                struct TgPage **out);

/**
 * Releases a page. Null is ignored.
 *
 * # Safety
 * `page` must come from [`tg_page_interpret`] and not be used afterwards.
 */
void tg_page_free(struct TgPage *page);

/**
 * Number of placed glyphs, or 0 for null.
 *
 * # Safety
 * `page` must be null or a live page handle.
 */
size_t tg_page_glyph_count(const struct TgPage *page);

/**
 * Number of rules, or 0 for null.
 *
 * # Safety
 * `page` must be null or a live page handle.
 */
size_t tg_page_rule_count(const struct TgPage *page);

/**
 * Writes the box as `xmin, ymin, xmax, ymax` in big points.
 *
 * # Safety
 * `page` must be a live handle and `out` point to 4 writable doubles.
 */
enum TgStatus tg_page_bbox(const struct TgPage *page, double *out);

/**
 * Translation moving the anchor at fractions (`hjust`, `vjust`) of the box
 * to the origin. A NaN fraction selects the baseline reference instead.
 *
 * # Safety
 * `page` must be a live handle; `dx` and `dy` writable.
 */
enum TgStatus tg_page_anchor(const struct TgPage *page,
                             double hjust,
                             double vjust,
                             double *dx,
                             double *dy);

/**
 * Writes the page JSON document to `*out`.
 *
 * # Safety
 * `page` must be a live handle and `out` writable.
 */
enum TgStatus tg_page_to_json(const struct TgPage *page, char **out);

/**
 * Writes an SVG document to `*out`. `text_mode` nonzero emits `<text>`
 * elements instead of outline paths; `scale` is output units per bp.
 *
 * # Safety
 * `page` must be a live handle and `out` writable.
 */
enum TgStatus tg_page_to_svg(const struct TgPage *page, int text_mode, double scale, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void tg_string_free(char *s);

/**
 * Releases a buffer returned by [`tg_program_serialize`]. Null is ignored.
 *
 * # Safety
 * `data`/`len` must be exactly what the library returned.
 */
void tg_bytes_free(uint8_t *data, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEXGLYPH_H */
