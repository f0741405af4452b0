#include <stdio.h>
#include "binec.h"

int main(void) {
    BinecField *field = NULL;
    BinecTransfer *transfer = NULL;
    BinecCodebook *book = NULL;
    size_t len = 0;

    if (binec_field_new(1, &field) != BINEC_STATUS_OK) return 1;
    if (binec_transfer_synthetic(field, 2, 3, 5, 100, &transfer) != BINEC_STATUS_OK) return 1;
    if (binec_codebook_build(transfer, 6, 1, 18, 5, false, &book) != BINEC_STATUS_OK) {
        fprintf(stderr, "%s\n", binec_last_error_message());
        return 1;
    }
    binec_codebook_len(book, &len);
    printf("%zu\n", len);

    binec_codebook_free(book);
    binec_transfer_free(transfer);
    binec_field_free(field);
    return 0;
}
