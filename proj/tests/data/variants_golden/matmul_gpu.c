void matmul(int n, double a[], double b[], double c[]) {
    #pragma omp target teams distribute parallel for num_teams(128) num_threads(64)
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++) {
            double s = 0.0;
            for (int k = 0; k < n; k++) {
                s += a[i * n + k] * b[k * n + j];
            }
            c[i * n + j] = s;
        }
    }
}
