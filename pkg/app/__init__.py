# QuasiToda application
