/* Minimal consumer of the fibm C ABI.
 *
 * Build (from the workspace root, after `cargo build -p fibm-ffi --release`):
 *
 *   cc crates/fibm-ffi/examples/fibm_demo.c -I crates/fibm-ffi/include \
 *      target/release/libfibm_ffi.a -lpthread -lm -ldl -o fibm_demo
 *
 *   ./fibm_demo data/karate.edges data/karate_3communities.txt
 */
#include <stdio.h>
#include <stdlib.h>

#include "fibm.h"

static void die(const char *where) {
    fprintf(stderr, "%s: %s\n", where, fibm_last_error_message());
    exit(1);
}

int main(int argc, char **argv) {
    if (argc != 3) {
        fprintf(stderr, "usage: %s GRAPH COMMUNITIES\n", argv[0]);
        return 1;
    }

    FibmGraph *graph = NULL;
    if (fibm_graph_load(argv[1], /*directed=*/false, /*uniform_weights=*/true, &graph) !=
        FibmStatus_Ok)
        die("graph load");
    printf("graph: %llu nodes, %llu arcs\n",
           (unsigned long long)fibm_graph_node_count(graph),
           (unsigned long long)fibm_graph_arc_count(graph));

    FibmPartition *partition = NULL;
    if (fibm_partition_load(argv[2], graph, &partition) != FibmStatus_Ok)
        die("partition load");

    uint64_t negative[1];
    size_t negative_count = 0;
    if (fibm_top_degree_seeds(graph, 1, negative, 1, &negative_count) != FibmStatus_Ok)
        die("top degree");
    printf("negative seed: %llu\n", (unsigned long long)negative[0]);

    FibmIndex *index = NULL;
    if (fibm_index_build(graph, partition, negative, negative_count, 2000, 42, &index) !=
        FibmStatus_Ok)
        die("index build");

    uint64_t seeds[3];
    size_t seed_count = 0;
    FibmMetrics metrics;
    if (fibm_select(index, 3, 0.5, 0.5, FibmSelector_CelfR, seeds, 3, &seed_count, &metrics) !=
        FibmStatus_Ok)
        die("select");

    printf("selected:");
    for (size_t i = 0; i < seed_count; i++)
        printf(" %llu", (unsigned long long)seeds[i]);
    printf("\nF=%.4f W=%.4f K=%.4f dp_gap=%.4f evaluations=%llu\n",
           metrics.effectiveness, metrics.fairness, metrics.objective, metrics.dp_gap,
           (unsigned long long)metrics.evaluations);

    fibm_index_free(index);
    fibm_partition_free(partition);
    fibm_graph_free(graph);
    return 0;
}
