name = "pgx"
