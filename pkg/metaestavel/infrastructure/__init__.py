# Mantenha __init__.py vazio por enquanto para evitar dependências circulares
